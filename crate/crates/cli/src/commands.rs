//! Subcommand table and handlers.
//!
//! Every handler reads its named arguments from a JSON object and returns a
//! JSON payload; the dispatcher adds the schema version.

use arithline::affine_line::{eval_line_seminorm, flow};
use arithline::base_space::{
    base_norm, classify_base_point, eval_base_seminorm, minimality_witnesses, product_formula_defect, ring_label,
    shilov_base, BaseCompact, Place, PointClass,
};
use arithline::cousin_cartan::{
    cartan_factorize, describe_split, laurent_side_report, matrix_norm, neumann_inverse, runge_approximate,
    split_laurent_sides, split_rational, split_series_arith, ArithmeticSplit, LaurentSplit, SplitSystem, Splitter,
};
use arithline::covers_galois::{
    binomial_root_series, cyclic_cover_split, eisenstein_witness, find_prime_congruent, group_cover_data,
    mu_homomorphism, primitive_root_of_unity, CoverDescriptor,
};
use arithline::rational::p_pow;
use arithline::selftest::run_selftest;
use arithline::series_ring::{invert_unit, norm_annulus, shilov_annulus, uniform_norm_annulus};
use arithline::weierstrass::{
    condition_rg_check, divide, divide_local_series, global_threshold, hensel_factor_lift, hensel_lift_root,
    lagrange_bound_report, prepare, residual_norm_sandwich, resultant, ExactRoot, HenselRing, HenselRoot, LocalDivision,
    QuotientRing,
};
use arithline::{Error, Precision, Result, Q};
use serde_json::{json, Map, Value};

use crate::json as j;

/// Global settings shared by all subcommands.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub prec: Precision,
    /// Default series modulus `T^trunc`.
    pub trunc: i64,
    /// Default p-adic precision.
    pub padic_prec: u32,
    pub seed: u64,
}

pub struct Args<'a> {
    map: &'a Map<String, Value>,
    pub s: Settings,
}

impl Args<'_> {
    fn req(&self, k: &str) -> Result<&Value> {
        self.map.get(k).ok_or_else(|| Error::Malformed(format!("missing argument --{k}")))
    }

    fn opt(&self, k: &str) -> Option<&Value> {
        self.map.get(k).filter(|v| !v.is_null())
    }

    fn q(&self, k: &str) -> Result<Q> {
        j::rational(self.req(k)?)
    }

    fn compact_or_whole(&self, k: &str) -> Result<BaseCompact> {
        self.opt(k).map(j::compact).transpose().map(|c| c.unwrap_or_else(BaseCompact::whole))
    }

    fn trunc(&self, k: &str) -> Result<i64> {
        self.opt(k).map(j::integer).transpose().map(|m| m.unwrap_or(self.s.trunc))
    }

    fn padic(&self, k: &str) -> Result<u32> {
        match self.opt(k) {
            None => Ok(self.s.padic_prec),
            Some(v) => u32::try_from(j::unsigned(v)?).map_err(|_| Error::Malformed("precision too large".into())),
        }
    }

    fn split_system(&self) -> Result<SplitSystem> {
        let place = j::place(self.req("place")?)?;
        let u = self.opt("u").map(j::rational).transpose()?.unwrap_or_else(|| Q::from_integer(1.into()));
        let ann = match self.opt("annulus") {
            None => None,
            Some(v) => {
                let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Malformed("annulus must be [s, t]".into()))?;
                Some((j::rational(&pair[0])?, j::rational(&pair[1])?))
            }
        };
        SplitSystem::new(place, u, ann)
    }
}

type Handler = fn(&Args) -> Result<Value>;

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [&'static str],
    pub run: Handler,
}

macro_rules! cmd {
    ($name:literal, $about:literal, [$($k:literal),*], $f:expr) => {
        CommandSpec { name: $name, about: $about, keys: &[$($k),*], run: $f }
    };
}

pub const COMMANDS: &[CommandSpec] = &[
    cmd!("eval-base", "Seminorm |f|_x of a rational at a base point", ["f", "point"], eval_base),
    cmd!("product-formula", "Product of |f|_v over all places", ["f"], product_formula),
    cmd!("classify", "Classify a base point as central, internal or extreme", ["point"], classify),
    cmd!("base-norm", "Sup norm of a rational over a compact of the base", ["f", "compact"], base_norm_cmd),
    cmd!("shilov", "Shilov boundary of a compact, optionally with minimality witnesses", ["compact", "witnesses"], shilov),
    cmd!("ring-label", "Ring of sections over a compact of the base", ["compact"], ring_label_cmd),
    cmd!("eval-line", "Seminorm of a polynomial at a point of the line", ["F", "point"], eval_line),
    cmd!("flow", "Image of a line point under x -> x^eps", ["point", "eps"], flow_cmd),
    cmd!("norm-annulus", "Weighted sum norm of a Laurent polynomial", ["f", "annulus"], norm_annulus_cmd),
    cmd!("unif-norm", "Uniform norm over a relative annulus", ["f", "annulus"], unif_norm),
    cmd!("shilov-annulus", "Shilov boundary of a relative annulus", ["annulus"], shilov_annulus_cmd),
    cmd!("invert-unit", "Inverse of a unit series with certificate", ["f", "annulus", "m"], invert_unit_cmd),
    cmd!("threshold", "Certified division threshold of a monic polynomial", ["G", "compact"], threshold),
    cmd!("divide", "Global Weierstrass division with certificate", ["F", "G", "compact", "w"], divide_cmd),
    cmd!("divide-local", "Local division by a series of Weierstrass degree p", ["F", "G", "p", "m", "annulus", "radius"], divide_local),
    cmd!("prepare", "Weierstrass preparation G = E * Omega", ["G", "p", "m", "annulus", "radius"], prepare_cmd),
    cmd!("hensel", "Newton lifting of a root (p-adic or power series)", ["poly", "p", "f0", "n", "coeffs", "m"], hensel),
    cmd!("hensel-factor", "Lift a coprime factorization modulo p to p^n", ["G", "p", "factors", "n"], hensel_factor),
    cmd!("resultant", "Resultant of two polynomials", ["f", "g"], resultant_cmd),
    cmd!("lagrange-bound", "Coefficient bound from values at the roots", ["f", "g", "roots", "r", "place"], lagrange_bound),
    cmd!("residual-norm", "Residual norm sandwich in a quotient ring", ["G", "compact", "w", "F"], residual_norm),
    cmd!("condition-rg", "Check the resultant condition on a compact", ["compact", "G"], condition_rg),
    cmd!("cousin-split", "Split a rational as a_minus - a_plus", ["a", "place", "u"], cousin_split),
    cmd!("split-sides", "Split a Laurent polynomial by sign of exponents", ["f", "annulus"], split_sides),
    cmd!("split-series", "Coefficientwise arithmetic split of a Laurent polynomial", ["f", "place", "u", "annulus"], split_series),
    cmd!("runge", "Approximate two families across a place", ["s", "t", "place", "u", "annulus", "delta"], runge),
    cmd!("matrix-norm", "Max row-sum norm of a matrix of series", ["a", "annulus"], matrix_norm_cmd),
    cmd!("neumann", "Neumann-series inverse of I + N", ["a", "annulus", "m"], neumann),
    cmd!("cartan", "Cartan factorization a = c_minus c_plus", ["a", "splitter", "annulus", "place", "u", "max_iter", "tol"], cartan),
    cmd!("cover", "Check the splitting of the cyclic cover S^n = p^n + T", ["n", "p", "m", "prec"], cover),
    cmd!("zeta", "p-adic primitive n-th root of unity", ["n", "p", "prec", "bound"], zeta),
    cmd!("binomial", "Series (1+Z)^(1/n) with p-integrality check", ["n", "m", "p"], binomial),
    cmd!("eisenstein", "Implicit series root with convergence radii", ["coeffs", "f0", "m", "places"], eisenstein),
    cmd!("group-data", "Coset data and permutation for the i-th element", ["group", "i"], group_data),
    cmd!("group-mu", "Left regular representation and its checks", ["group"], group_mu),
    cmd!("selftest", "Run the seeded invariant suites", ["suite"], selftest),
];

pub fn find(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

pub fn run(spec: &CommandSpec, map: &Map<String, Value>, s: Settings) -> Result<Value> {
    (spec.run)(&Args { map, s })
}

fn eval_base(a: &Args) -> Result<Value> {
    Ok(j::norm(&eval_base_seminorm(&a.q("f")?, &j::base_point(a.req("point")?)?, a.s.prec)?))
}

fn product_formula(a: &Args) -> Result<Value> {
    Ok(j::norm(&product_formula_defect(&a.q("f")?)?))
}

fn classify(a: &Args) -> Result<Value> {
    let c = match classify_base_point(&j::base_point(a.req("point")?)?) {
        PointClass::Central => "central",
        PointClass::Internal => "internal",
        PointClass::Extreme => "extreme",
    };
    Ok(json!({ "class": c }))
}

fn base_norm_cmd(a: &Args) -> Result<Value> {
    Ok(j::norm(&base_norm(&a.q("f")?, &j::compact(a.req("compact")?)?, a.s.prec)?))
}

fn shilov(a: &Args) -> Result<Value> {
    let v = j::compact(a.req("compact")?)?;
    let points: Vec<Value> = shilov_base(&v).iter().map(j::base_point_out).collect();
    let mut out = json!({ "points": points });
    if a.opt("witnesses").map(j::boolean).transpose()?.unwrap_or(false) {
        out["witnesses"] = minimality_witnesses(&v, a.s.prec)
            .iter()
            .map(|(x, f)| json!({ "point": j::base_point_out(x), "f": f.as_ref().map(j::q) }))
            .collect();
    }
    Ok(out)
}

fn ring_label_cmd(a: &Args) -> Result<Value> {
    let r = ring_label(&j::compact(a.req("compact")?)?);
    Ok(json!({
        "kind": format!("{:?}", r.kind),
        "label": r.label,
        "inverted_primes": r.inverted_primes,
        "completion_prime": r.completion_prime,
        "local_prime": r.local_prime,
    }))
}

fn eval_line(a: &Args) -> Result<Value> {
    Ok(j::norm(&eval_line_seminorm(&j::poly(a.req("F")?)?, &j::line_point(a.req("point")?)?, a.s.prec)?))
}

fn flow_cmd(a: &Args) -> Result<Value> {
    Ok(json!({ "point": j::line_point_out(&flow(&j::line_point(a.req("point")?)?, &a.q("eps")?)?) }))
}

fn norm_annulus_cmd(a: &Args) -> Result<Value> {
    Ok(j::norm(&norm_annulus(&j::laurent(a.req("f")?)?, &j::annulus(a.req("annulus")?)?, a.s.prec)?))
}

fn unif_norm(a: &Args) -> Result<Value> {
    Ok(j::norm(&uniform_norm_annulus(&j::laurent(a.req("f")?)?, &j::annulus(a.req("annulus")?)?, a.s.prec)?))
}

fn shilov_annulus_cmd(a: &Args) -> Result<Value> {
    let pts = shilov_annulus(&j::annulus(a.req("annulus")?)?)?;
    Ok(json!({ "points": pts.iter().map(j::line_point_out).collect::<Vec<_>>() }))
}

fn invert_unit_cmd(a: &Args) -> Result<Value> {
    let c = invert_unit(&j::laurent(a.req("f")?)?, &j::annulus(a.req("annulus")?)?, a.trunc("m")?, a.s.prec)?;
    Ok(json!({
        "g": j::laurent_out(&c.g),
        "h_norm": j::norm(&c.h_norm),
        "terms": c.terms,
        "congruence": j::congruence_out(&c.congruence),
        "residual": j::norm(&c.residual),
    }))
}

fn threshold(a: &Args) -> Result<Value> {
    Ok(json!({ "threshold": j::q(&global_threshold(&j::poly(a.req("G")?)?, &a.compact_or_whole("compact")?, a.s.prec)?) }))
}

fn divide_cmd(a: &Args) -> Result<Value> {
    let g = j::poly(a.req("G")?)?;
    let v = a.compact_or_whole("compact")?;
    let w = match a.opt("w") {
        Some(w) => j::rational(w)?,
        None => global_threshold(&g, &v, a.s.prec)?,
    };
    let d = divide(&j::laurent(a.req("F")?)?, &g, &v, &w, a.s.prec)?;
    let as_poly = |f: &arithline::series_ring::LaurentPoly| f.to_poly().map(|p| j::poly_out(&p)).unwrap_or(Value::Null);
    Ok(json!({
        "Q": as_poly(&d.q),
        "R": as_poly(&d.r),
        "cert": {
            "v": j::q(&d.cert.v),
            "w": j::q(&d.cert.w),
            "norm_F": j::norm(&d.cert.norm_f),
            "norm_Q": j::norm(&d.cert.norm_q),
            "norm_R": j::norm(&d.cert.norm_r),
            "bound_Q": d.cert.bound_q_ok,
            "bound_R": d.cert.bound_r_ok,
        },
    }))
}

fn local_division_out(d: &LocalDivision) -> Value {
    json!({
        "Q": j::laurent_out(&d.q),
        "R": j::laurent_out(&d.r),
        "regime": format!("{:?}", d.regime).to_lowercase(),
        "radius": j::q(&d.radius),
        "epsilon": j::norm(&d.epsilon),
        "iterations": d.iterations,
        "error_norms": j::norms(&d.error_norms),
        "contraction_consistent": d.contraction_consistent,
        "exact": d.exact,
        "residual": j::norm(&d.residual),
    })
}

fn local_inputs(a: &Args) -> Result<(i64, i64, arithline::series_ring::AnnulusSpec, Option<Q>)> {
    let p = j::integer(a.req("p")?)?;
    let m = a.trunc("m")?;
    let ctx = j::annulus(a.req("annulus")?)?;
    let radius = a.opt("radius").map(j::rational).transpose()?;
    Ok((p, m, ctx, radius))
}

fn divide_local(a: &Args) -> Result<Value> {
    let (p, m, ctx, radius) = local_inputs(a)?;
    let d = divide_local_series(&j::laurent(a.req("F")?)?, &j::laurent(a.req("G")?)?, p, m, &ctx, radius.as_ref(), a.s.prec)?;
    Ok(local_division_out(&d))
}

fn prepare_cmd(a: &Args) -> Result<Value> {
    let (p, m, ctx, radius) = local_inputs(a)?;
    let r = prepare(&j::laurent(a.req("G")?)?, p, m, &ctx, radius.as_ref(), a.s.prec)?;
    Ok(json!({
        "E": j::laurent_out(&r.e),
        "Omega": j::poly_out(&r.omega),
        "modulus": r.modulus,
        "division": local_division_out(&r.division),
    }))
}

fn hensel(a: &Args) -> Result<Value> {
    let ring = if let Some(p) = a.opt("p") {
        HenselRing::Padic {
            poly: j::poly(a.req("poly")?)?,
            p: j::unsigned(p)?,
            f0: j::big_integer(a.req("f0")?)?,
            n: a.padic("n")?,
        }
    } else {
        HenselRing::Series { coeffs: j::laurent_list(a.req("coeffs")?)?, f0: j::laurent(a.req("f0")?)?, m: a.trunc("m")? }
    };
    let lift = hensel_lift_root(&ring)?;
    let root = match &lift.root {
        HenselRoot::Padic(x) => json!(x.to_string()),
        HenselRoot::Series(f) => j::laurent_out(f),
    };
    Ok(json!({
        "root": root,
        "gauges": lift.gauges,
        "derivative_order": lift.derivative_order,
        "iterations": lift.iterations,
    }))
}

fn hensel_factor(a: &Args) -> Result<Value> {
    let factors = a.req("factors")?.as_array().ok_or_else(|| Error::Malformed("factors must be a list".into()))?;
    let factors = factors.iter().map(j::poly).collect::<Result<Vec<_>>>()?;
    let n = a.padic("n")?;
    let lifted = hensel_factor_lift(&j::poly(a.req("G")?)?, j::unsigned(a.req("p")?)?, &factors, n)?;
    Ok(json!({ "factors": lifted.iter().map(j::poly_out).collect::<Vec<_>>() }))
}

fn resultant_cmd(a: &Args) -> Result<Value> {
    Ok(json!({ "resultant": j::q(&resultant(&j::poly(a.req("f")?)?, &j::poly(a.req("g")?)?)) }))
}

fn exact_root(v: &Value) -> Result<ExactRoot> {
    match v {
        Value::Object(o) => Ok(ExactRoot::Gaussian {
            re: j::rational(o.get("re").unwrap_or(&json!(0)))?,
            im: j::rational(o.get("im").unwrap_or(&json!(0)))?,
        }),
        _ => Ok(ExactRoot::Rational(j::rational(v)?)),
    }
}

fn lagrange_bound(a: &Args) -> Result<Value> {
    let roots = a.req("roots")?.as_array().ok_or_else(|| Error::Malformed("roots must be a list".into()))?;
    let roots = roots.iter().map(exact_root).collect::<Result<Vec<_>>>()?;
    let place = a.opt("place").map(j::place).transpose()?.unwrap_or(Place::Infinite);
    let r = lagrange_bound_report(&j::poly(a.req("f")?)?, &j::poly(a.req("g")?)?, &roots, &a.q("r")?, place, a.s.prec)?;
    Ok(json!({ "lhs": j::norm(&r.lhs), "D": j::norm(&r.d), "rhs": j::norm(&r.rhs), "holds": r.holds }))
}

fn residual_norm(a: &Args) -> Result<Value> {
    let ring = QuotientRing::new(j::poly(a.req("G")?)?, a.compact_or_whole("compact")?, a.q("w")?, a.s.prec)?;
    let s = residual_norm_sandwich(&ring, &j::poly(a.req("F")?)?, a.s.prec)?;
    Ok(json!({
        "representative": j::poly_out(&s.representative),
        "div_norm": j::norm(&s.div_norm),
        "upper": j::norm(&s.upper),
        "lower": j::norm(&s.lower),
        "consistent": s.consistent,
    }))
}

fn condition_rg(a: &Args) -> Result<Value> {
    let r = condition_rg_check(&j::compact(a.req("compact")?)?, &j::poly(a.req("G")?)?, a.s.prec)?;
    Ok(json!({
        "holds": r.holds,
        "resultant": j::q(&r.resultant),
        "gamma": r.gamma.iter().map(|(x, n)| json!({ "point": j::base_point_out(x), "value": j::norm(n) })).collect::<Vec<_>>(),
        "m_U": j::norm(&r.m_u),
    }))
}

fn cousin_split(a: &Args) -> Result<Value> {
    let sys = a.split_system()?;
    let s = split_rational(&a.q("a")?, &sys, a.s.prec)?;
    Ok(json!({
        "a_minus": j::q(&s.a_minus),
        "a_plus": j::q(&s.a_plus),
        "norm_a": j::norm(&s.norm_a),
        "norm_minus": j::norm(&s.norm_minus),
        "norm_plus": j::norm(&s.norm_plus),
        "C": j::q(&sys.c),
        "D": j::q(&sys.d),
        "sides_ok": s.sides_ok,
        "bounds_ok": s.bounds_ok,
        "identity": describe_split(&s),
    }))
}

fn split_sides(a: &Args) -> Result<Value> {
    let f = j::laurent(a.req("f")?)?;
    let (pos, neg) = split_laurent_sides(&f);
    let mut out = json!({ "nonneg": j::laurent_out(&pos), "neg": j::laurent_out(&neg) });
    if let Some(ann) = a.opt("annulus") {
        let r = laurent_side_report(&f, &j::annulus(ann)?, a.s.prec)?;
        out["norm_f"] = j::norm(&r.norm_f);
        out["norm_nonneg"] = j::norm(&r.norm_nonneg);
        out["norm_neg"] = j::norm(&r.norm_neg);
        out["bounds_ok"] = json!(r.bounds_ok);
    }
    Ok(out)
}

fn split_series(a: &Args) -> Result<Value> {
    let s = split_series_arith(&j::laurent(a.req("f")?)?, &a.split_system()?, a.s.prec)?;
    Ok(json!({
        "f_minus": j::laurent_out(&s.f_minus),
        "f_plus": j::laurent_out(&s.f_plus),
        "norm_f": j::norm(&s.norm_f),
        "norm_minus": j::norm(&s.norm_minus),
        "norm_plus": j::norm(&s.norm_plus),
        "sides_ok": s.sides_ok,
        "bounds_ok": s.bounds_ok,
    }))
}

fn runge(a: &Args) -> Result<Value> {
    let r = runge_approximate(
        &j::laurent_list(a.req("s")?)?,
        &j::laurent_list(a.req("t")?)?,
        &a.split_system()?,
        &a.q("delta")?,
        a.s.prec,
    )?;
    Ok(json!({
        "f": j::q(&r.f),
        "s_primes": r.s_primes.iter().map(j::laurent_out).collect::<Vec<_>>(),
        "t_primes": r.t_primes.iter().map(j::laurent_out).collect::<Vec<_>>(),
        "s_defect": j::norm(&r.s_defect),
        "t_defect": j::norm(&r.t_defect),
        "ok": r.ok,
    }))
}

fn matrix_norm_cmd(a: &Args) -> Result<Value> {
    Ok(j::norm(&matrix_norm(&j::matrix(a.req("a")?)?, &j::annulus(a.req("annulus")?)?, a.s.prec)?))
}

fn neumann(a: &Args) -> Result<Value> {
    let r = neumann_inverse(&j::matrix(a.req("a")?)?, &j::annulus(a.req("annulus")?)?, a.trunc("m")?, a.s.prec)?;
    Ok(json!({
        "b": j::matrix_out(&r.b),
        "norm_b": j::norm(&r.norm_b),
        "terms": r.terms,
        "congruence": j::congruence_out(&r.congruence),
        "residual": j::norm(&r.residual),
    }))
}

fn cartan(a: &Args) -> Result<Value> {
    let m = j::matrix(a.req("a")?)?;
    let kind = a.opt("splitter").and_then(Value::as_str).unwrap_or("laurent");
    let splitter: Box<dyn Splitter> = match kind {
        "laurent" => Box::new(LaurentSplit(j::annulus(a.req("annulus")?)?)),
        "arithmetic" => Box::new(ArithmeticSplit(a.split_system()?)),
        other => return Err(Error::Malformed(format!("unknown splitter {other:?}"))),
    };
    let max_iter = a.opt("max_iter").map(j::unsigned).transpose()?.unwrap_or(60) as usize;
    let tol = a.opt("tol").map(j::rational).transpose()?.unwrap_or_else(|| p_pow(2, -40));
    let r = cartan_factorize(&m, splitter.as_ref(), max_iter, &tol, a.s.prec)?;
    Ok(json!({
        "c_minus": j::matrix_out(&r.c_minus),
        "c_plus": j::matrix_out(&r.c_plus),
        "residual": j::norm(&r.residual),
        "iterations": r.iterations,
        "M": j::norm(&r.m),
        "beta": j::q(&r.beta),
        "b_norms": j::norms(&r.b_norms),
        "decay_ok": r.decay_ok,
        "bound_4d_ok": r.bound_4d_ok,
        "sides_ok": r.sides_ok,
        "invertible_ok": r.invertible_ok,
        "one_sided": r.one_sided,
    }))
}

fn cover(a: &Args) -> Result<Value> {
    let n = j::unsigned(a.req("n")?)?;
    let p = j::unsigned(a.req("p")?)?;
    let m = a.opt("m").map(j::unsigned).transpose()?.unwrap_or(6) as usize;
    let d = CoverDescriptor::build(n, p, m, a.padic("prec")?)?;
    let r = cyclic_cover_split(&d)?;
    Ok(json!({
        "zeta": d.zeta.residue().to_string(),
        "g": j::laurent_out(&d.g),
        "product": r.product.iter().map(j::laurent_out).collect::<Vec<_>>(),
        "defects": r.defects.iter().map(|x| json!({
            "s_power": x.s_power,
            "t_power": x.t_power,
            "defect": j::q(&x.defect),
            "required": x.required,
            "ok": x.ok,
        })).collect::<Vec<_>>(),
        "all_zero": r.all_zero,
    }))
}

fn zeta(a: &Args) -> Result<Value> {
    let n = j::unsigned(a.req("n")?)?;
    let p = match a.opt("p") {
        Some(p) => j::unsigned(p)?,
        None => find_prime_congruent(n, a.opt("bound").map(j::unsigned).transpose()?.unwrap_or(1000))?,
    };
    let z = primitive_root_of_unity(n, p, a.padic("prec")?)?;
    Ok(json!({ "p": z.p, "prec": z.n, "residue": z.residue().to_string(), "modulus": z.modulus().to_string() }))
}

fn binomial(a: &Args) -> Result<Value> {
    let n = j::unsigned(a.req("n")?)?;
    let m = a.trunc("m")?;
    let m = usize::try_from(m).map_err(|_| Error::Malformed("m must be positive".into()))?;
    let p = a.opt("p").map(j::unsigned).transpose()?;
    let b = binomial_root_series(n, m, p)?;
    let integrality = b.integrality.map(|r| json!({ "p": r.p, "min_valuation": r.min_valuation, "integral": r.integral }));
    Ok(json!({ "g": j::laurent_out(&b.g), "power_ok": b.power_ok, "integrality": integrality }))
}

fn eisenstein(a: &Args) -> Result<Value> {
    let places = match a.opt("places") {
        None => vec![Place::Infinite],
        Some(v) => v.as_array().ok_or_else(|| Error::Malformed("places must be a list".into()))?.iter().map(j::place).collect::<Result<_>>()?,
    };
    let w = eisenstein_witness(&j::laurent_list(a.req("coeffs")?)?, &j::laurent(a.req("f0")?)?, a.trunc("m")?, &places, a.s.prec)?;
    let radii: Map<String, Value> =
        w.radii.iter().map(|(pl, r)| (pl.to_string(), r.as_ref().map(j::norm).unwrap_or(Value::Null))).collect();
    Ok(json!({ "f": j::laurent_out(&w.f), "denominator": w.denominator.to_string(), "radii": radii }))
}

fn group_data(a: &Args) -> Result<Value> {
    let g = j::group(a.req("group")?)?;
    let d = group_cover_data(&g, j::unsigned(a.req("i")?)? as usize)?;
    Ok(json!({ "n_i": d.n_i, "d_i": d.d_i, "reps": d.reps, "sigma": d.sigma }))
}

fn group_mu(a: &Args) -> Result<Value> {
    let r = mu_homomorphism(&j::group(a.req("group")?)?);
    Ok(json!({ "map": r.map, "injective": r.injective, "homomorphism": r.homomorphism }))
}

fn selftest(a: &Args) -> Result<Value> {
    let suite = a.opt("suite").and_then(Value::as_str).unwrap_or("all");
    let reports = run_selftest(suite, a.s.seed, a.s.prec)?;
    Ok(json!({
        "seed": a.s.seed,
        "suites": reports.iter().map(|r| json!({
            "suite": r.suite,
            "passed": r.passed,
            "failed": r.failed,
            "first_counterexample": r.first_counterexample,
        })).collect::<Vec<_>>(),
        "all_pass": reports.iter().all(|r| r.ok()),
    }))
}
