//! Parametric regression over compact parameter spaces.
//!
//! The Boehm side fits with the loss `Σ |M_p(x_i) - O(x_i)|`, minimised or
//! searched for a fit within one code step of zero. The signed-digit side
//! uses least closeness: the shortest agreeing output prefix over the
//! observations, capped.

use std::collections::HashMap;
use std::sync::Arc;

use crate::boehm::{CFunction, TBEncoding, TernaryCode};
use crate::dyadic::Dyadic;
use crate::error::{ErsError, Result};
use crate::expr::{compile_boehm_with, compile_sd, CmpOp, Comparison, Expr, SdFunction};
use crate::optimisation::{global_min, Algo, OptResult};
use crate::par;
use crate::search::{
    boehm_comparison_with, boehm_pair_comparison, search_sd_decreasing, search_sd_exhaustive,
    search_tb_exhaustive, SdSearchResult, SearchResult, UCPredicate,
};
use crate::signed_digit::{self as sd, Digit3, SDStream};

/// Default closeness cap standing in for infinite closeness.
pub const DEFAULT_CAP: usize = 64;

/// Oracle input distortion `x ↦ mid(x, 1/4)`.
pub fn quarter_mid(predictor: &str) -> Expr {
    Expr::mid(Expr::var(predictor), Expr::lit(Dyadic::from_parts(1, 2)))
}

/// A Boehm regression problem with absolute-sum loss.
#[derive(Clone, Debug)]
pub struct Regression {
    pub model: Expr,
    pub oracle: Expr,
    pub params: Vec<String>,
    pub predictor: String,
    /// Closed expressions; names bound in `env` may appear.
    pub observations: Vec<Expr>,
    pub env: HashMap<String, TBEncoding>,
}

impl Regression {
    pub fn new(
        model: Expr,
        oracle: Expr,
        params: &[&str],
        predictor: &str,
        observations: Vec<Expr>,
    ) -> Result<Self> {
        if observations.is_empty() {
            return Err(ErsError::EmptyObservations);
        }
        if params.is_empty() || params.len() > 2 {
            return Err(ErsError::Invalid(format!(
                "expected one or two parameters, got {}",
                params.len()
            )));
        }
        Ok(Regression {
            model,
            oracle,
            params: params.iter().map(|s| s.to_string()).collect(),
            predictor: predictor.to_string(),
            observations,
            env: HashMap::new(),
        })
    }

    /// Binds `name` to an encoding, e.g. an observation given only as an encoding.
    pub fn bind(mut self, name: &str, enc: TBEncoding) -> Self {
        self.env.insert(name.to_string(), enc);
        self
    }

    /// The same problem with the oracle reading `psi(x)` instead of `x`.
    pub fn distorted(&self, psi: &Expr) -> Self {
        let mut r = self.clone();
        r.oracle = self.oracle.substitute(&self.predictor, psi);
        r
    }

    pub fn loss_expr(&self) -> Expr {
        let term = |o: &Expr| {
            let m = self.model.substitute(&self.predictor, o);
            let y = self.oracle.substitute(&self.predictor, o);
            Expr::abs(Expr::sub(m, y))
        };
        let mut it = self.observations.iter().map(term);
        let first = it.next().expect("observations are non-empty");
        it.fold(first, Expr::add)
    }

    fn param_refs(&self) -> Vec<&str> {
        self.params.iter().map(String::as_str).collect()
    }

    /// The loss as a function of the parameters.
    pub fn loss_function(&self) -> Result<CFunction> {
        compile_boehm_with(&self.loss_expr(), &self.param_refs(), &self.env)
    }

    pub fn loss(&self, p: &[TBEncoding]) -> Result<TBEncoding> {
        self.loss_function()?.apply(p)
    }

    fn fit_predicate(&self) -> Comparison {
        Comparison {
            lhs: self.loss_expr(),
            op: CmpOp::Close,
            rhs: Expr::lit(Dyadic::zero()),
        }
    }
}

/// `ε`-best single parameter by minimising the loss.
pub fn regress_opt(
    r: &Regression,
    anchor: &TernaryCode,
    eps: i64,
    algo: Algo,
) -> Result<OptResult> {
    if r.params.len() != 1 {
        return Err(ErsError::Unsupported(
            "optimisation over more than one parameter".into(),
        ));
    }
    global_min(&r.loss_function()?, anchor, eps, algo)
}

/// First parameter whose level-`ε` loss code is within one of zero's.
pub fn regress_search(r: &Regression, anchor: &TernaryCode, eps: i64) -> Result<SearchResult> {
    if r.params.len() != 1 {
        return Err(ErsError::Invalid(
            "use regress_search_pair for two parameters".into(),
        ));
    }
    let pred = boehm_comparison_with(&r.fit_predicate(), &r.params[0], anchor, eps, &r.env)?;
    search_tb_exhaustive(anchor, &pred)
}

pub fn regress_search_pair(
    r: &Regression,
    anchors: (&TernaryCode, &TernaryCode),
    eps: i64,
) -> Result<(SearchResult, SearchResult)> {
    if r.params.len() != 2 {
        return Err(ErsError::Invalid("expected two parameters".into()));
    }
    let vars = (r.params[0].as_str(), r.params[1].as_str());
    let pred = boehm_pair_comparison(&r.fit_predicate(), vars, anchors, eps, &r.env)?;
    crate::search::search_tb_pair(anchors.0, anchors.1, &pred)
}

/// Number of leading digits on which `a` and `b` agree, at most `cap`.
pub fn closeness(a: &SDStream, b: &SDStream, cap: usize) -> usize {
    (0..cap).find(|&i| a.at(i) != b.at(i)).unwrap_or(cap)
}

pub type SdOracle = Arc<dyn Fn(&SDStream) -> SDStream + Send + Sync>;

/// A signed-digit regression problem with least-closeness loss.
#[derive(Clone)]
pub struct SdRegression {
    /// Binary function of `(p, x)`.
    pub model: SdFunction,
    pub oracle: SdOracle,
    pub observations: Vec<SDStream>,
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdAlgo {
    Exhaustive,
    Decreasing,
}

#[derive(Clone, Debug)]
pub struct SdOptResult {
    pub prefix: Vec<Digit3>,
    pub witness: SDStream,
    /// Least closeness at the witness, capped at `ε`.
    pub closeness: usize,
    pub evaluations: u64,
}

impl SdRegression {
    pub fn new(model: SdFunction, oracle: SdOracle, observations: Vec<SDStream>) -> Result<Self> {
        if observations.is_empty() {
            return Err(ErsError::EmptyObservations);
        }
        if model.arity() != 2 {
            return Err(ErsError::Invalid(format!(
                "model must take (p, x), got arity {}",
                model.arity()
            )));
        }
        Ok(SdRegression {
            model,
            oracle,
            observations,
            cap: DEFAULT_CAP,
        })
    }

    /// Builds from expressions in `param` and `predictor`.
    pub fn from_exprs(
        model: &Expr,
        oracle: &Expr,
        param: &str,
        predictor: &str,
        observations: Vec<SDStream>,
    ) -> Result<Self> {
        let m = compile_sd(model, &[param, predictor])?;
        let o = compile_sd(oracle, &[predictor])?;
        Self::new(
            m,
            Arc::new(move |x: &SDStream| o.apply(std::slice::from_ref(x))),
            observations,
        )
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// The oracle composed with an input distortion.
    pub fn distorted(&self, psi: impl Fn(&SDStream) -> SDStream + Send + Sync + 'static) -> Self {
        let o = Arc::clone(&self.oracle);
        SdRegression {
            oracle: Arc::new(move |x: &SDStream| o(&psi(x))),
            ..self.clone()
        }
    }

    pub fn least_closeness(&self, p: &SDStream) -> usize {
        self.observations
            .iter()
            .map(|x| {
                closeness(
                    &self.model.apply(&[p.clone(), x.clone()]),
                    &(self.oracle)(x),
                    self.cap,
                )
            })
            .min()
            .expect("observations are non-empty")
    }

    fn modulus(&self, eps: usize) -> usize {
        self.model.modulus(eps)
    }

    /// First parameter with least closeness at least `ε`.
    pub fn regress_search(&self, eps: usize, algo: SdAlgo) -> Result<SdSearchResult> {
        let me = self.clone();
        let pred = UCPredicate::new(self.modulus(eps) as i64, move |p: &SDStream| {
            me.least_closeness(p) >= eps
        });
        match algo {
            SdAlgo::Exhaustive => search_sd_exhaustive(&pred),
            SdAlgo::Decreasing => Ok(search_sd_decreasing(&pred)),
        }
    }

    /// Parameter maximising least closeness capped at `ε`, first on ties.
    pub fn regress_opt(&self, eps: usize) -> Result<SdOptResult> {
        let delta = self.modulus(eps);
        if delta >= 63 {
            return Err(ErsError::Invalid(format!(
                "2^{delta} candidates is too many"
            )));
        }
        let bits = |i: u64| (0..delta).map(|j| (i >> j) & 1 == 1).collect::<Vec<bool>>();
        let n = 1u64 << delta;
        let (i, neg) = par::argmin(n, |i| {
            let c = self
                .least_closeness(&sd::from_binary_prefix(&bits(i)))
                .min(eps);
            std::cmp::Reverse(c)
        })
        .expect("non-empty net");
        let b = bits(i);
        Ok(SdOptResult {
            prefix: b
                .iter()
                .map(|&x| if x { Digit3::POS } else { Digit3::NEG })
                .collect(),
            witness: sd::from_binary_prefix(&b),
            closeness: neg.0,
            evaluations: n,
        })
    }
}
