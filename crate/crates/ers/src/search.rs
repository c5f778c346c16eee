//! Search for encodings satisfying uniformly continuous predicates.
//!
//! A predicate carries a modulus `δ`: encodings agreeing up to level `δ`
//! (Boehm) or on their `δ`-prefix (signed digits) get the same verdict, so
//! checking one completion per `δ`-net element is exhaustive.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::boehm::{net, tb_from_ternary_code, TBEncoding, TernaryCode};
use crate::dyadic::Dyadic;
use crate::error::{ErsError, Result};
use crate::expr::{compile_boehm_with, compile_sd, CmpOp, Comparison};
use crate::par;
use crate::signed_digit::{self as sd, Digit3, SDStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

type Decide<X> = Arc<dyn Fn(&X) -> bool + Send + Sync>;
type IntervalForm = Arc<dyn Fn(&TernaryCode) -> Verdict + Send + Sync>;

/// A decidable predicate with its modulus of uniform continuity.
pub struct UCPredicate<X> {
    decide: Decide<X>,
    modulus: i64,
    interval_form: Option<IntervalForm>,
}

impl<X> Clone for UCPredicate<X> {
    fn clone(&self) -> Self {
        UCPredicate {
            decide: Arc::clone(&self.decide),
            modulus: self.modulus,
            interval_form: self.interval_form.clone(),
        }
    }
}

impl<X> UCPredicate<X> {
    pub fn new(modulus: i64, decide: impl Fn(&X) -> bool + Send + Sync + 'static) -> Self {
        UCPredicate {
            decide: Arc::new(decide),
            modulus,
            interval_form: None,
        }
    }

    /// Adds a three-valued verdict on whole codes. It must be sound: `True`
    /// (`False`) only if every encoding through the code satisfies (fails).
    pub fn with_interval_form(
        mut self,
        f: impl Fn(&TernaryCode) -> Verdict + Send + Sync + 'static,
    ) -> Self {
        self.interval_form = Some(Arc::new(f));
        self
    }

    pub fn decide(&self, x: &X) -> bool {
        (self.decide)(x)
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn interval_form(&self, code: &TernaryCode) -> Option<Verdict> {
        self.interval_form.as_ref().map(|f| f(code))
    }

    pub fn has_interval_form(&self) -> bool {
        self.interval_form.is_some()
    }
}

type PairDecide = Arc<dyn Fn(&TBEncoding, &TBEncoding) -> bool + Send + Sync>;

/// A predicate on pairs with per-component moduli.
pub struct PairPredicate {
    decide: PairDecide,
    pub modulus: (i64, i64),
}

impl PairPredicate {
    pub fn new(
        modulus: (i64, i64),
        decide: impl Fn(&TBEncoding, &TBEncoding) -> bool + Send + Sync + 'static,
    ) -> Self {
        PairPredicate {
            decide: Arc::new(decide),
            modulus,
        }
    }

    pub fn decide(&self, x: &TBEncoding, y: &TBEncoding) -> bool {
        (self.decide)(x, y)
    }
}

/// Outcome of a Boehm search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub found: bool,
    pub code: Option<TernaryCode>,
    pub witness: Option<TBEncoding>,
    /// Number of `decide` calls.
    pub evaluations: u64,
}

impl SearchResult {
    fn hit(code: TernaryCode, evaluations: u64) -> Self {
        let witness = tb_from_ternary_code(&code).enc;
        SearchResult {
            found: true,
            code: Some(code),
            witness: Some(witness),
            evaluations,
        }
    }

    fn miss(evaluations: u64) -> Self {
        SearchResult {
            found: false,
            code: None,
            witness: None,
            evaluations,
        }
    }
}

/// Outcome of a signed-digit search.
#[derive(Clone, Debug)]
pub struct SdSearchResult {
    pub found: bool,
    /// The decisive `δ`-prefix; the witness continues with `-1`.
    pub prefix: Vec<Digit3>,
    pub witness: SDStream,
    pub evaluations: u64,
}

/// Tests the left-endpoint completion of each `δ`-net element in ascending order.
pub fn search_tb_exhaustive(
    anchor: &TernaryCode,
    pred: &UCPredicate<TBEncoding>,
) -> Result<SearchResult> {
    let n = net(anchor, pred.modulus())?;
    let len = net_len(n.len())?;
    let (hit, evals) = par::first_index(len, |j| {
        pred.decide(&tb_from_ternary_code(&n.get(j as u128)).enc)
    });
    Ok(match hit {
        Some(j) => SearchResult::hit(n.get(j as u128), evals),
        None => SearchResult::miss(evals),
    })
}

fn net_len(len: u128) -> Result<u64> {
    u64::try_from(len)
        .map_err(|_| ErsError::Invalid(format!("net of {len} candidates is too large")))
}

/// Nested search: the first `x` for which some `y` works, with the first such `y`.
pub fn search_tb_pair(
    ax: &TernaryCode,
    ay: &TernaryCode,
    pred: &PairPredicate,
) -> Result<(SearchResult, SearchResult)> {
    let nx = net(ax, pred.modulus.0)?;
    let ny = net(ay, pred.modulus.1)?;
    let (lx, ly) = (net_len(nx.len())?, net_len(ny.len())?);
    let mut evals = 0u64;
    for i in 0..lx {
        let cx = nx.get(i as u128);
        let x = tb_from_ternary_code(&cx).enc;
        let (hit, e) = par::first_index(ly, |j| {
            pred.decide(&x, &tb_from_ternary_code(&ny.get(j as u128)).enc)
        });
        evals += e;
        if let Some(j) = hit {
            return Ok((
                SearchResult::hit(cx, evals),
                SearchResult::hit(ny.get(j as u128), evals),
            ));
        }
    }
    Ok((SearchResult::miss(evals), SearchResult::miss(evals)))
}

/// Breadth-first refinement guided by the predicate's interval form.
///
/// Codes judged `True` are returned at once, `False` codes are pruned and
/// `Unknown` codes are split (left child first) until the modulus level,
/// where `decide` settles them.
pub fn search_branching(
    anchor: &TernaryCode,
    pred: &UCPredicate<TBEncoding>,
) -> Result<SearchResult> {
    if !pred.has_interval_form() {
        return Err(ErsError::MissingIntervalForm);
    }
    let delta = pred.modulus();
    if delta < anchor.p {
        return Err(ErsError::BelowAnchor {
            level: delta,
            anchor: anchor.p,
        });
    }
    let mut queue = VecDeque::from([anchor.clone()]);
    let mut evals = 0u64;
    while let Some(code) = queue.pop_front() {
        match pred.interval_form(&code) {
            Some(Verdict::True) => return Ok(SearchResult::hit(code, evals)),
            Some(Verdict::False) => continue,
            _ => {}
        }
        if code.p < delta {
            queue.push_back(code.down_left());
            queue.push_back(code.down_right());
        } else {
            evals += 1;
            if pred.decide(&tb_from_ternary_code(&code).enc) {
                return Ok(SearchResult::hit(code, evals));
            }
        }
    }
    Ok(SearchResult::miss(evals))
}

/// Binary digits of candidate `i`: bit `j` of `i` chooses digit `j`.
fn binary_candidate(i: u64, delta: usize) -> Vec<bool> {
    (0..delta).map(|j| j < 64 && (i >> j) & 1 == 1).collect()
}

fn to_digits(bits: &[bool]) -> Vec<Digit3> {
    bits.iter()
        .map(|&b| if b { Digit3::POS } else { Digit3::NEG })
        .collect()
}

/// Tests all `2^δ` binary prefixes, each completed with `-1`.
///
/// Candidate `i` takes digit `j` from bit `j` of `i`, so the first digit
/// varies fastest.
pub fn search_sd_exhaustive(pred: &UCPredicate<SDStream>) -> Result<SdSearchResult> {
    let delta = usize::try_from(pred.modulus())
        .map_err(|_| ErsError::Invalid("negative modulus".into()))?;
    if delta >= 63 {
        return Err(ErsError::Invalid(format!(
            "2^{delta} candidates is too many"
        )));
    }
    let (hit, evals) = par::first_index(1u64 << delta, |i| {
        pred.decide(&sd::from_binary_prefix(&binary_candidate(i, delta)))
    });
    Ok(match hit {
        Some(i) => {
            let bits = binary_candidate(i, delta);
            SdSearchResult {
                found: true,
                prefix: to_digits(&bits),
                witness: sd::from_binary_prefix(&bits),
                evaluations: evals,
            }
        }
        None => SdSearchResult {
            found: false,
            prefix: vec![Digit3::NEG; delta],
            witness: sd::repeat(Digit3::NEG),
            evaluations: evals,
        },
    })
}

/// Head/tail searcher over binary sequences with a decreasing modulus.
///
/// The head bit is `0` if the best tail after `0` works, else `1`; the
/// tail is found by the same search with modulus `δ - 1`. Returns the
/// lexicographically least satisfier if any exists.
pub fn search_sd_decreasing_modulus(pred: &UCPredicate<SDStream>) -> SDStream {
    search_sd_decreasing(pred).witness
}

/// [`search_sd_decreasing_modulus`] with the found flag and prefix.
pub fn search_sd_decreasing(pred: &UCPredicate<SDStream>) -> SdSearchResult {
    let delta = pred.modulus().max(0) as usize;
    let mut evals = 0u64;
    let mut p = |bits: &[bool]| {
        evals += 1;
        pred.decide(&sd::from_binary_prefix(bits))
    };
    let mut fixed = Vec::with_capacity(delta);
    let bits = if delta == 0 {
        Vec::new()
    } else {
        decreasing(&mut p, &mut fixed, delta)
    };
    let witness = sd::from_binary_prefix(&bits);
    let found = p(&bits);
    SdSearchResult {
        found,
        prefix: to_digits(&bits),
        witness,
        evaluations: evals,
    }
}

fn decreasing(
    p: &mut dyn FnMut(&[bool]) -> bool,
    fixed: &mut Vec<bool>,
    remaining: usize,
) -> Vec<bool> {
    if remaining == 0 {
        return Vec::new();
    }
    fixed.push(false);
    let t0 = decreasing(p, fixed, remaining - 1);
    let mut full = fixed.clone();
    full.extend_from_slice(&t0);
    let ok = p(&full);
    fixed.pop();
    if ok {
        let mut r = vec![false];
        r.extend(t0);
        return r;
    }
    fixed.push(true);
    let t1 = decreasing(p, fixed, remaining - 1);
    fixed.pop();
    let mut r = vec![true];
    r.extend(t1);
    r
}

/// Code bounds `[lo, hi]` of any level-`ε` output code whose value lies in `[a, b]`.
fn code_range(a: &Dyadic, b: &Dyadic, eps: i64) -> (BigInt, BigInt) {
    (a.ceil_at(eps) - 2, b.floor_at(eps))
}

/// Verdict of a comparison on the code ranges of both sides.
fn compare_ranges(op: CmpOp, a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> Verdict {
    let le = |a: &(BigInt, BigInt), b: &(BigInt, BigInt)| {
        if a.1 <= &b.0 + 1 {
            Verdict::True
        } else if a.0 > &b.1 + 1 {
            Verdict::False
        } else {
            Verdict::Unknown
        }
    };
    match op {
        CmpOp::Le => le(a, b),
        CmpOp::Ge => le(b, a),
        CmpOp::Close => match (le(a, b), le(b, a)) {
            (Verdict::True, Verdict::True) => Verdict::True,
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            _ => Verdict::Unknown,
        },
    }
}

fn compare_codes(op: CmpOp, a: &BigInt, b: &BigInt) -> bool {
    match op {
        CmpOp::Le => a <= &(b + 1),
        CmpOp::Ge => b <= &(a + 1),
        CmpOp::Close => (a - b).abs() <= BigInt::from(1),
    }
}

/// Predicate `lhs op rhs` in one variable, comparing level-`ε` output codes
/// within one code step, with an interval form from the output bounds.
pub fn boehm_comparison(
    cmp: &Comparison,
    var: &str,
    anchor: &TernaryCode,
    eps: i64,
) -> Result<UCPredicate<TBEncoding>> {
    boehm_comparison_with(cmp, var, anchor, eps, &HashMap::new())
}

/// [`boehm_comparison`] with free names other than `var` bound in `env`.
pub fn boehm_comparison_with(
    cmp: &Comparison,
    var: &str,
    anchor: &TernaryCode,
    eps: i64,
    env: &HashMap<String, TBEncoding>,
) -> Result<UCPredicate<TBEncoding>> {
    let fa = compile_boehm_with(&cmp.lhs, &[var], env)?;
    let fb = compile_boehm_with(&cmp.rhs, &[var], env)?;
    let delta = fa.modulus(eps, std::slice::from_ref(anchor))[0]
        .max(fb.modulus(eps, std::slice::from_ref(anchor))[0])
        .max(anchor.p);
    let op = cmp.op;
    let (ga, gb) = (fa.clone(), fb.clone());
    let pred = UCPredicate::new(delta, move |x: &TBEncoding| {
        let a = fa.apply(std::slice::from_ref(x)).expect("unary").at(eps);
        let b = fb.apply(std::slice::from_ref(x)).expect("unary").at(eps);
        compare_codes(op, &a, &b)
    });
    Ok(pred.with_interval_form(move |code| {
        let ia = ga.bound(std::slice::from_ref(code));
        let ib = gb.bound(std::slice::from_ref(code));
        compare_ranges(
            op,
            &code_range(&ia.lower(), &ia.upper(), eps),
            &code_range(&ib.lower(), &ib.upper(), eps),
        )
    }))
}

/// Pair predicate `lhs op rhs` in two variables, other names bound in `env`.
pub fn boehm_pair_comparison(
    cmp: &Comparison,
    vars: (&str, &str),
    anchors: (&TernaryCode, &TernaryCode),
    eps: i64,
    env: &HashMap<String, TBEncoding>,
) -> Result<PairPredicate> {
    let fa = compile_boehm_with(&cmp.lhs, &[vars.0, vars.1], env)?;
    let fb = compile_boehm_with(&cmp.rhs, &[vars.0, vars.1], env)?;
    let an = [anchors.0.clone(), anchors.1.clone()];
    let (ma, mb) = (fa.modulus(eps, &an), fb.modulus(eps, &an));
    let modulus = (
        ma[0].max(mb[0]).max(anchors.0.p),
        ma[1].max(mb[1]).max(anchors.1.p),
    );
    let op = cmp.op;
    Ok(PairPredicate::new(modulus, move |x, y| {
        let args = [x.clone(), y.clone()];
        let a = fa.apply(&args).expect("binary").at(eps);
        let b = fb.apply(&args).expect("binary").at(eps);
        compare_codes(op, &a, &b)
    }))
}

/// Signed-digit predicate: `<=`/`>=` by the level-`ε` approximate order,
/// `==` by `ε`-prefix closeness.
pub fn sd_comparison(cmp: &Comparison, var: &str, eps: usize) -> Result<UCPredicate<SDStream>> {
    let fa = compile_sd(&cmp.lhs, &[var])?;
    let fb = compile_sd(&cmp.rhs, &[var])?;
    let delta = fa.modulus(eps).max(fb.modulus(eps)) as i64;
    let op = cmp.op;
    Ok(UCPredicate::new(delta, move |x: &SDStream| {
        let a = fa.apply(std::slice::from_ref(x));
        let b = fb.apply(std::slice::from_ref(x));
        match op {
            CmpOp::Le => sd::approx_leq(&a, &b, eps),
            CmpOp::Ge => sd::approx_leq(&b, &a, eps),
            CmpOp::Close => sd::prefix_eq(&a, &b, eps),
        }
    }))
}
