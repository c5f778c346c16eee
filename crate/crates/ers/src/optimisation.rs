//! ε-global optimisation of completed functions over a compact anchor.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;

use crate::boehm::{net, tb_from_ternary_code, CFunction, TBEncoding, TernaryCode};
use crate::dyadic::Dyadic;
use crate::error::{ErsError, Result};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Exhaustive,
    Bnb,
}

#[derive(Clone, Debug)]
pub struct OptResult {
    pub arg_code: TernaryCode,
    pub arg: TBEncoding,
    /// Level-`ε` code of the function value at `arg`.
    pub value_code: TernaryCode,
    /// Function evaluations (exhaustive) or node bounds (branch and bound).
    pub evaluations: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sense {
    Min,
    Max,
}

fn check_unary(f: &CFunction) -> Result<()> {
    if f.arity() != 1 {
        return Err(ErsError::Invalid(format!(
            "expected a unary function, got arity {}",
            f.arity()
        )));
    }
    Ok(())
}

/// Input level needed for output level `eps`.
pub fn delta_for(f: &CFunction, anchor: &TernaryCode, eps: i64) -> i64 {
    f.modulus(eps, std::slice::from_ref(anchor))[0].max(anchor.p)
}

fn finish(f: &CFunction, code: TernaryCode, eps: i64, evaluations: u64) -> Result<OptResult> {
    let arg = tb_from_ternary_code(&code).enc;
    let value = f.apply(std::slice::from_ref(&arg))?;
    let value_code = value.try_code(eps)?;
    Ok(OptResult {
        arg_code: code,
        arg,
        value_code,
        evaluations,
    })
}

fn exhaustive(f: &CFunction, anchor: &TernaryCode, eps: i64, sense: Sense) -> Result<OptResult> {
    check_unary(f)?;
    let n = net(anchor, delta_for(f, anchor, eps))?;
    let len = u64::try_from(n.len()).map_err(|_| ErsError::Invalid("net too large".into()))?;
    let best = par::argmin(len, |j| {
        let x = tb_from_ternary_code(&n.get(j as u128)).enc;
        let v = f.apply(&[x]).and_then(|y| y.try_at(eps));
        // Errors sort last and are re-raised below if they win.
        match v {
            Ok(k) => (0u8, if sense == Sense::Min { k } else { -k }),
            Err(_) => (1u8, BigInt::from(0)),
        }
    });
    let (j, _) = best.ok_or_else(|| ErsError::Invalid("empty net".into()))?;
    finish(f, n.get(j as u128), eps, len)
}

/// Net candidate whose level-`ε` value code is least, first on ties.
pub fn global_min_exhaustive(f: &CFunction, anchor: &TernaryCode, eps: i64) -> Result<OptResult> {
    exhaustive(f, anchor, eps, Sense::Min)
}

/// Net candidate whose level-`ε` value code is greatest, first on ties.
pub fn global_max_exhaustive(f: &CFunction, anchor: &TernaryCode, eps: i64) -> Result<OptResult> {
    exhaustive(f, anchor, eps, Sense::Max)
}

type Key = (i64, BigInt);

struct Node {
    lo: Dyadic,
    hi: Dyadic,
    left: Dyadic,
}

/// Node set indexed for the three queries of the branch-and-bound loop.
#[derive(Default)]
struct Frontier {
    nodes: HashMap<Key, Node>,
    by_level: BTreeSet<Key>,
    by_lower: BTreeSet<(Dyadic, Dyadic, Key)>,
    by_upper: BTreeSet<(Dyadic, Key)>,
}

impl Frontier {
    fn insert(&mut self, key: Key, node: Node) {
        self.by_level.insert(key.clone());
        self.by_lower
            .insert((node.lo.clone(), node.left.clone(), key.clone()));
        self.by_upper.insert((node.hi.clone(), key.clone()));
        self.nodes.insert(key, node);
    }

    fn remove(&mut self, key: &Key) -> Option<Node> {
        let node = self.nodes.remove(key)?;
        self.by_level.remove(key);
        self.by_lower
            .remove(&(node.lo.clone(), node.left.clone(), key.clone()));
        self.by_upper.remove(&(node.hi.clone(), key.clone()));
        Some(node)
    }
}

fn bnb(f: &CFunction, anchor: &TernaryCode, eps: i64, sense: Sense) -> Result<OptResult> {
    check_unary(f)?;
    let delta = delta_for(f, anchor, eps);
    let threshold = Dyadic::from_parts(1, eps - 1);
    let mut evals = 0u64;
    let mut bound = |code: &TernaryCode| -> Node {
        evals += 1;
        let b = f.bound(std::slice::from_ref(code));
        let (lo, hi) = match sense {
            Sense::Min => (b.lower(), b.upper()),
            Sense::Max => (-b.upper(), -b.lower()),
        };
        Node {
            lo,
            hi,
            left: code.lower(),
        }
    };
    let mut fr = Frontier::default();
    let root = bound(anchor);
    fr.insert((anchor.p, anchor.k.clone()), root);
    loop {
        let (_, _, best) = fr
            .by_lower
            .first()
            .cloned()
            .expect("frontier keeps its minimiser");
        let node = &fr.nodes[&best];
        if best.0 >= delta || &node.hi - &node.lo <= threshold {
            let code = TernaryCode {
                k: best.1,
                p: best.0,
            };
            return finish(f, code, eps, evals);
        }
        let widest = fr.by_level.first().cloned().expect("non-empty frontier");
        fr.remove(&widest);
        let parent = TernaryCode {
            k: widest.1,
            p: widest.0,
        };
        for child in [parent.down_left(), parent.down_right()] {
            let n = bound(&child);
            fr.insert((child.p, child.k), n);
        }
        let min_upper = fr
            .by_upper
            .first()
            .map(|(u, _)| u.clone())
            .expect("non-empty frontier");
        while let Some((lo, _, key)) = fr.by_lower.last().cloned() {
            if lo > min_upper {
                fr.remove(&key);
            } else {
                break;
            }
        }
    }
}

/// Branch and bound: split the widest node, prune nodes whose lower bound
/// exceeds the least upper bound, stop when the node with the least lower
/// bound reaches the modulus level or has output width at most `2^(1-ε)`.
pub fn global_min_bnb(f: &CFunction, anchor: &TernaryCode, eps: i64) -> Result<OptResult> {
    bnb(f, anchor, eps, Sense::Min)
}

/// [`global_min_bnb`] with the order reversed.
pub fn global_max_bnb(f: &CFunction, anchor: &TernaryCode, eps: i64) -> Result<OptResult> {
    bnb(f, anchor, eps, Sense::Max)
}

pub fn global_min(f: &CFunction, anchor: &TernaryCode, eps: i64, algo: Algo) -> Result<OptResult> {
    match algo {
        Algo::Exhaustive => global_min_exhaustive(f, anchor, eps),
        Algo::Bnb => global_min_bnb(f, anchor, eps),
    }
}

pub fn global_max(f: &CFunction, anchor: &TernaryCode, eps: i64, algo: Algo) -> Result<OptResult> {
    match algo {
        Algo::Exhaustive => global_max_exhaustive(f, anchor, eps),
        Algo::Bnb => global_max_bnb(f, anchor, eps),
    }
}
