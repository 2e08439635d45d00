use super::explicit::{expand, ExpandError, ExplicitCgs};
use crate::coalition::{AgentId, Coalition};
use crate::formula::Formula;
use crate::model::{Rcgs1Model, StateId};
use crate::norm::NormativeSystem;
use crate::semantics::StateSet;

struct Naive<'a> {
    model: &'a Rcgs1Model,
    norm: &'a NormativeSystem,
    cgs: ExplicitCgs,
}

impl Naive<'_> {
    fn allowed(&self, compliance: &Coalition, q: StateId, agent: usize, action: usize) -> bool {
        let x = AgentId(agent as u32 + 1);
        !(compliance.contains(x) && self.norm.forbidden(q, x).contains(action))
    }

    /// Legal assignments of actions to `members`, as full-length tuples
    /// with the other slots left at zero.
    fn assignments(&self, compliance: &Coalition, q: StateId, members: &[usize]) -> Vec<Vec<usize>> {
        let m = self.cgs.actions(q);
        let mut out = Vec::new();
        let total = m.pow(members.len() as u32);
        for mut code in 0..total {
            let mut tuple = vec![0; self.cgs.agents()];
            let mut ok = true;
            for &x in members {
                let a = code % m;
                code /= m;
                ok &= self.allowed(compliance, q, x, a);
                tuple[x] = a;
            }
            if ok {
                out.push(tuple);
            }
        }
        out
    }

    fn can_force(&self, compliance: &Coalition, q: StateId, acting: &Coalition, target: &[bool]) -> bool {
        let n = self.cgs.agents();
        let ours: Vec<usize> = (0..n).filter(|&i| acting.contains(AgentId(i as u32 + 1))).collect();
        let theirs: Vec<usize> = (0..n).filter(|&i| !acting.contains(AgentId(i as u32 + 1))).collect();
        let replies = self.assignments(compliance, q, &theirs);
        self.assignments(compliance, q, &ours).iter().any(|mine| {
            replies.iter().all(|reply| {
                let joint: Vec<usize> = (0..n)
                    .map(|i| if ours.contains(&i) { mine[i] } else { reply[i] })
                    .collect();
                target[self.cgs.delta(q, &joint).index()]
            })
        })
    }

    fn pre(&self, compliance: &Coalition, acting: &Coalition, target: &[bool]) -> Vec<bool> {
        (0..self.cgs.state_count())
            .map(|q| self.can_force(compliance, StateId(q), acting, target))
            .collect()
    }

    fn eval(&self, compliance: &Coalition, phi: &Formula) -> Vec<bool> {
        let states = self.cgs.state_count();
        match phi {
            Formula::Top => vec![true; states],
            Formula::Prop(p) => (0..states).map(|q| self.model.label(StateId(q)).contains(p)).collect(),
            Formula::Not(f) => self.eval(compliance, f).into_iter().map(|b| !b).collect(),
            Formula::Or(a, b) => zip(&self.eval(compliance, a), &self.eval(compliance, b), |x, y| x || y),
            Formula::And(a, b) => zip(&self.eval(compliance, a), &self.eval(compliance, b), |x, y| x && y),
            Formula::Next(c, f) => self.pre(compliance, c, &self.eval(compliance, f)),
            Formula::Globally(c, f) => {
                let body = self.eval(compliance, f);
                let mut z = vec![true; states];
                loop {
                    let next = zip(&body, &self.pre(compliance, c, &z), |x, y| x && y);
                    if next == z {
                        return z;
                    }
                    z = next;
                }
            }
            Formula::Until(c, f, g) => {
                let hold = self.eval(compliance, f);
                let goal = self.eval(compliance, g);
                let mut z = vec![false; states];
                loop {
                    let step = self.pre(compliance, c, &z);
                    let next: Vec<bool> = (0..states).map(|q| goal[q] || (hold[q] && step[q])).collect();
                    if next == z {
                        return z;
                    }
                    z = next;
                }
            }
            Formula::Comply(c, f) => self.eval(c, f),
        }
    }
}

fn zip(a: &[bool], b: &[bool], op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
}

/// Evaluates `phi` by quantifying over action tuples of the expanded structure.
pub fn naive_mcheck(
    model: &Rcgs1Model,
    norm: &NormativeSystem,
    compliance: &Coalition,
    phi: &Formula,
    budget: u128,
) -> Result<StateSet, ExpandError> {
    let naive = Naive {
        model,
        norm,
        cgs: expand(model, budget)?,
    };
    Ok(naive
        .eval(compliance, phi)
        .into_iter()
        .enumerate()
        .filter(|(_, b)| *b)
        .map(|(q, _)| StateId(q))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::figure1;
    use crate::oracle::DEFAULT_BUDGET;

    fn q0_satisfies(phi: &Formula) -> bool {
        let m = figure1(5).unwrap();
        let states = naive_mcheck(&m, &NormativeSystem::empty(), &Coalition::empty(), phi, DEFAULT_BUDGET).unwrap();
        states.contains(m.state_id("q0").unwrap())
    }

    #[test]
    fn five_agent_examples() {
        let both = Formula::prop("p1").and(Formula::prop("p2"));
        assert!(q0_satisfies(&Formula::next(Coalition::grand(5), both.clone())));
        assert!(!q0_satisfies(&Formula::next(Coalition::from_indices([1, 2]), both)));
        let m = figure1(5).unwrap();
        let all = naive_mcheck(&m, &NormativeSystem::empty(), &Coalition::empty(), &Formula::Top, DEFAULT_BUDGET).unwrap();
        assert_eq!(all.len(), m.state_count());
    }
}
