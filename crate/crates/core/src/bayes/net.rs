use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dot::DotWriter;
use crate::error::{Error, Result};
use crate::num::Scalar;

/// Largest number of joint states that enumeration will visit.
pub const MAX_ENUMERATION: usize = 1 << 22;

/// Largest joint state space accepted by the independence check.
pub const MAX_INDEPENDENCE_STATES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(name: impl Into<String>, states: impl IntoIterator<Item = S>) -> Self {
        Variable {
            name: name.into(),
            states: states.into_iter().map(Into::into).collect(),
        }
    }

    fn state_index(&self, state: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == state)
            .ok_or_else(|| Error::Network(format!("node {} has no state {state}", self.name)))
    }
}

/// Directed graph over named finite variables. Parents of a node keep the
/// order in which their arcs were declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<Variable>,
    arcs: Vec<(usize, usize)>,
    parents: Vec<Vec<usize>>,
}

impl Dag {
    /// Checks names, states and arc endpoints; cycles are reported by
    /// [`check_acyclic`].
    pub fn new(nodes: Vec<Variable>, arcs: &[(&str, &str)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &nodes {
            if v.name.is_empty() {
                return Err(Error::Network("empty node name".into()));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(Error::Network(format!("duplicate node {}", v.name)));
            }
            if v.states.is_empty() {
                return Err(Error::Network(format!("node {} has no states", v.name)));
            }
            let mut states = BTreeSet::new();
            if let Some(s) = v.states.iter().find(|s| !states.insert(s.as_str())) {
                return Err(Error::Network(format!("node {} repeats state {s}", v.name)));
            }
        }
        let find = |name: &str| {
            nodes
                .iter()
                .position(|v| v.name == name)
                .ok_or_else(|| Error::Network(format!("arc endpoint {name} is not a node")))
        };
        let mut parents = vec![Vec::new(); nodes.len()];
        let mut resolved = Vec::with_capacity(arcs.len());
        for &(p, c) in arcs {
            let (pi, ci) = (find(p)?, find(c)?);
            if resolved.contains(&(pi, ci)) {
                return Err(Error::Network(format!("duplicate arc {p} -> {c}")));
            }
            resolved.push((pi, ci));
            parents[ci].push(pi);
        }
        Ok(Dag {
            nodes,
            arcs: resolved,
            parents,
        })
    }

    pub fn nodes(&self) -> &[Variable] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::Network(format!("unknown node {name}")))
    }

    pub fn parents_of(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.arcs
            .iter()
            .map(|&(p, c)| (self.nodes[p].name.as_str(), self.nodes[c].name.as_str()))
    }

    fn topological(&self) -> std::result::Result<Vec<usize>, Vec<String>> {
        let n = self.nodes.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &(p, c) in &self.arcs {
                if p == i {
                    indegree[c] -= 1;
                    if indegree[c] == 0 {
                        ready.insert(c);
                    }
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // every leftover node has a leftover parent, so walking parents must loop
        let mut walk = vec![(0..n).find(|&i| indegree[i] > 0).expect("leftover node")];
        loop {
            let cur = *walk.last().unwrap();
            let next = self.parents[cur]
                .iter()
                .copied()
                .find(|&p| indegree[p] > 0)
                .expect("leftover parent");
            if let Some(pos) = walk.iter().position(|&w| w == next) {
                let mut cycle: Vec<String> = walk[pos..].iter().rev().map(|&i| self.nodes[i].name.clone()).collect();
                cycle.push(self.nodes[next].name.clone());
                return Err(cycle);
            }
            walk.push(next);
        }
    }
}

/// Topological order (parents first, declaration order among ready nodes),
/// or a cycle error naming the nodes on one cycle.
pub fn check_acyclic(dag: &Dag) -> Result<Vec<String>> {
    dag.topological()
        .map(|o| o.into_iter().map(|i| dag.nodes[i].name.clone()).collect())
        .map_err(Error::Cycle)
}

/// P(node | parents): one distribution per parent-state combination, the
/// first parent varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt<T> {
    pub node: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSpec {
    pub nodes: Vec<Variable>,
    pub arcs: Vec<[String; 2]>,
    /// node → comma-joined parent states (`""` for roots) → distribution.
    pub cpts: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet<T> {
    dag: Dag,
    order: Vec<usize>,
    cpts: Vec<Cpt<T>>,
}

fn prob_tol<T: Scalar>() -> T {
    T::from_f64_lossy(1e-9).max(T::epsilon() * T::from_count(64))
}

fn check_distribution<T: Scalar>(node: &str, key: &str, dist: &[T], states: usize) -> Result<()> {
    if dist.len() != states {
        return Err(Error::Network(format!(
            "{node} [{key}]: {} probabilities for {states} states",
            dist.len()
        )));
    }
    let tol = prob_tol::<T>();
    if let Some(p) = dist.iter().find(|p| !(p.is_finite() && **p >= T::zero())) {
        return Err(Error::Network(format!("{node} [{key}]: invalid probability {p}")));
    }
    let sum: T = dist.iter().copied().sum();
    if (sum - T::one()).abs() > tol {
        return Err(Error::Network(format!("{node} [{key}]: distribution sums to {sum}")));
    }
    Ok(())
}

impl<T: Scalar> BayesNet<T> {
    /// `cpts` may come in any order but must cover every node once, with
    /// parents listed exactly as the DAG declares them.
    pub fn new(dag: Dag, cpts: Vec<Cpt<T>>) -> Result<Self> {
        let order = check_acyclic(&dag)?;
        let order = order.iter().map(|n| dag.index_of(n)).collect::<Result<Vec<_>>>()?;
        let mut slots: Vec<Option<Cpt<T>>> = vec![None; dag.len()];
        for cpt in cpts {
            let i = dag.index_of(&cpt.node)?;
            if slots[i].is_some() {
                return Err(Error::Network(format!("two tables for node {}", cpt.node)));
            }
            let expected: Vec<&str> = dag.parents[i].iter().map(|&p| dag.nodes[p].name.as_str()).collect();
            if cpt.parents.iter().map(String::as_str).ne(expected.iter().copied()) {
                return Err(Error::Network(format!(
                    "table for {} lists parents [{}], graph has [{}]",
                    cpt.node,
                    cpt.parents.join(", "),
                    expected.join(", ")
                )));
            }
            let combos: usize = dag.parents[i].iter().map(|&p| dag.nodes[p].states.len()).product();
            if cpt.rows.len() != combos {
                return Err(Error::Network(format!(
                    "table for {} has {} rows, expected {combos}",
                    cpt.node,
                    cpt.rows.len()
                )));
            }
            for (r, dist) in cpt.rows.iter().enumerate() {
                let key = combo_key(&dag, i, r);
                check_distribution(&cpt.node, &key, dist, dag.nodes[i].states.len())?;
            }
            slots[i] = Some(cpt);
        }
        let cpts = slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Network(format!("no table for node {}", dag.nodes[i].name))))
            .collect::<Result<Vec<_>>>()?;
        Ok(BayesNet { dag, order, cpts })
    }

    pub fn from_spec(spec: &NetSpec) -> Result<Self> {
        let arcs: Vec<(&str, &str)> = spec.arcs.iter().map(|[p, c]| (p.as_str(), c.as_str())).collect();
        let dag = Dag::new(spec.nodes.clone(), &arcs)?;
        check_acyclic(&dag)?;
        if let Some(extra) = spec.cpts.keys().find(|k| dag.index_of(k).is_err()) {
            return Err(Error::Network(format!("table given for unknown node {extra}")));
        }
        let mut cpts = Vec::with_capacity(dag.len());
        for (i, var) in dag.nodes.iter().enumerate() {
            let table = spec
                .cpts
                .get(&var.name)
                .ok_or_else(|| Error::Network(format!("no table for node {}", var.name)))?;
            let combos: usize = dag.parents[i].iter().map(|&p| dag.nodes[p].states.len()).product();
            let mut rows = Vec::with_capacity(combos);
            for r in 0..combos {
                let key = combo_key(&dag, i, r);
                let dist = table.get(&key).ok_or_else(|| {
                    Error::Network(format!("table for {} lacks parent combination [{key}]", var.name))
                })?;
                check_distribution(&var.name, &key, dist, var.states.len())?;
                rows.push(dist.iter().map(|&p| T::from_f64_lossy(p)).collect());
            }
            if table.len() != combos {
                return Err(Error::Network(format!(
                    "table for {} has {} entries, expected {combos}",
                    var.name,
                    table.len()
                )));
            }
            cpts.push(Cpt {
                node: var.name.clone(),
                parents: dag.parents[i].iter().map(|&p| dag.nodes[p].name.clone()).collect(),
                rows,
            });
        }
        BayesNet::new(dag, cpts)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn to_spec(&self) -> NetSpec {
        let cpts = self
            .cpts
            .iter()
            .enumerate()
            .map(|(i, cpt)| {
                let table = cpt
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(r, d)| (combo_key(&self.dag, i, r), d.iter().map(|p| p.as_f64()).collect()))
                    .collect();
                (cpt.node.clone(), table)
            })
            .collect();
        NetSpec {
            nodes: self.dag.nodes.clone(),
            arcs: self.dag.arcs().map(|(p, c)| [p.to_string(), c.to_string()]).collect(),
            cpts,
        }
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpt(&self, node: &str) -> Result<&Cpt<T>> {
        Ok(&self.cpts[self.dag.index_of(node)?])
    }

    /// Node indices in topological order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    fn row_of(&self, node: usize, states: &[usize]) -> usize {
        self.dag.parents[node]
            .iter()
            .fold(0, |acc, &p| acc * self.dag.nodes[p].states.len() + states[p])
    }

    /// P(node = states[node] | its parents as set in `states`).
    pub fn term(&self, node: usize, states: &[usize]) -> T {
        self.cpts[node].rows[self.row_of(node, states)][states[node]]
    }

    /// Chain-rule product over a full assignment given as state indices in
    /// node declaration order.
    pub fn joint_indices(&self, states: &[usize]) -> T {
        self.order.iter().fold(T::one(), |acc, &i| acc * self.term(i, states))
    }

    fn resolve(&self, assignment: &BTreeMap<String, String>) -> Result<Vec<Option<usize>>> {
        let mut states = vec![None; self.dag.len()];
        for (name, state) in assignment {
            let i = self.dag.index_of(name)?;
            states[i] = Some(self.dag.nodes[i].state_index(state)?);
        }
        Ok(states)
    }

    /// Joint probability of a full assignment (node name → state).
    pub fn joint_probability(&self, assignment: &BTreeMap<String, String>) -> Result<T> {
        let states = self.resolve(assignment)?;
        let full = states
            .iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| Error::Network(format!("node {} is unassigned", self.dag.nodes[i].name))))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.joint_indices(&full))
    }

    /// Chain-rule terms in topological order, e.g. `P(s|e, h)`.
    pub fn factorization(&self) -> Vec<String> {
        self.order.iter().map(|&i| self.factorization_term(i)).collect()
    }

    /// Visits every full assignment that agrees with `fixed`, passing the
    /// state vector and its joint probability.
    fn enumerate(&self, fixed: &[Option<usize>], mut visit: impl FnMut(&[usize], T)) -> Result<()> {
        let free: Vec<usize> = (0..self.dag.len()).filter(|&i| fixed[i].is_none()).collect();
        let space = free
            .iter()
            .try_fold(1usize, |acc, &i| acc.checked_mul(self.dag.nodes[i].states.len()));
        if space.is_none_or(|s| s > MAX_ENUMERATION) {
            return Err(Error::Network("joint state space too large for enumeration".into()));
        }
        let mut states: Vec<usize> = fixed.iter().map(|s| s.unwrap_or(0)).collect();
        loop {
            visit(&states, self.joint_indices(&states));
            // odometer over the free nodes, last one fastest
            let mut k = free.len();
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                let i = free[k];
                states[i] += 1;
                if states[i] < self.dag.nodes[i].states.len() {
                    break;
                }
                states[i] = 0;
            }
        }
    }

    /// Exact posterior of `query` given `evidence` by enumeration.
    pub fn infer(&self, query: &str, evidence: &BTreeMap<String, String>) -> Result<Vec<T>> {
        let q = self.dag.index_of(query)?;
        if evidence.contains_key(query) {
            return Err(Error::Network(format!("query node {query} is also evidence")));
        }
        let fixed = self.resolve(evidence)?;
        self.posterior(q, &fixed)
    }

    fn posterior(&self, q: usize, fixed: &[Option<usize>]) -> Result<Vec<T>> {
        let mut mass = vec![T::zero(); self.dag.nodes[q].states.len()];
        self.enumerate(fixed, |states, p| mass[states[q]] += p)?;
        let total: T = mass.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::ZeroProbability);
        }
        Ok(mass.into_iter().map(|m| m / total).collect())
    }

    /// Whether P(x | y, z) = P(x | z) for every joint state of `y ∪ z` with
    /// positive probability, within `tol`.
    pub fn conditionally_independent(&self, x: &str, y: &[&str], z: &[&str], tol: T) -> Result<bool> {
        let xi = self.dag.index_of(x)?;
        let yi = y.iter().map(|n| self.dag.index_of(n)).collect::<Result<Vec<_>>>()?;
        let zi = z.iter().map(|n| self.dag.index_of(n)).collect::<Result<Vec<_>>>()?;
        let mut seen = BTreeSet::from([xi]);
        for &i in yi.iter().chain(&zi) {
            if !seen.insert(i) {
                return Err(Error::InvalidArgument(format!(
                    "node {} appears in more than one of x, y, z",
                    self.dag.nodes[i].name
                )));
            }
        }
        let space = self
            .dag
            .nodes
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.states.len()));
        if space.is_none_or(|s| s > MAX_INDEPENDENCE_STATES) {
            return Err(Error::Network(format!(
                "independence check limited to {MAX_INDEPENDENCE_STATES} joint states"
            )));
        }
        let both: Vec<usize> = zi.iter().chain(&yi).copied().collect();
        let mut fixed = vec![None; self.dag.len()];
        let mut states = vec![0usize; both.len()];
        loop {
            for (&i, &s) in both.iter().zip(&states) {
                fixed[i] = Some(s);
            }
            match self.posterior(xi, &fixed) {
                Ok(with_y) => {
                    let mut z_only = fixed.clone();
                    for &i in &yi {
                        z_only[i] = None;
                    }
                    let without_y = self.posterior(xi, &z_only)?;
                    if with_y.iter().zip(&without_y).any(|(a, b)| (*a - *b).abs() > tol) {
                        return Ok(false);
                    }
                }
                Err(Error::ZeroProbability) => {}
                Err(e) => return Err(e),
            }
            let mut k = both.len();
            loop {
                if k == 0 {
                    return Ok(true);
                }
                k -= 1;
                states[k] += 1;
                if states[k] < self.dag.nodes[both[k]].states.len() {
                    break;
                }
                states[k] = 0;
            }
        }
    }

    /// Graphviz digraph with one arc per parent → child pair.
    pub fn to_dot(&self) -> String {
        let mut w = DotWriter::new("net", &[("shape", "ellipse")]);
        for (i, v) in self.dag.nodes.iter().enumerate() {
            w.node(&format!("v{i}"), &v.name, &[]);
        }
        for &(p, c) in &self.dag.arcs {
            w.edge(&format!("v{p}"), &format!("v{c}"), None);
        }
        w.finish()
    }

    /// Aligned listing of every table.
    pub fn cpt_text(&self) -> String {
        let mut out = String::new();
        for &i in &self.order {
            let var = &self.dag.nodes[i];
            let cpt = &self.cpts[i];
            let mut rows: Vec<Vec<String>> = Vec::new();
            let mut head = vec![if cpt.parents.is_empty() {
                String::new()
            } else {
                cpt.parents.join(",")
            }];
            head.extend(var.states.iter().map(|s| format!("P({}={s})", var.name)));
            rows.push(head);
            for (r, dist) in cpt.rows.iter().enumerate() {
                let mut row = vec![combo_key(&self.dag, i, r)];
                row.extend(dist.iter().map(|p| format!("{:.3}", p.as_f64())));
                rows.push(row);
            }
            out.push_str(&self.factorization_term(i));
            out.push('\n');
            out.push_str(&align(&rows));
            out.push('\n');
        }
        out
    }

    fn factorization_term(&self, i: usize) -> String {
        let parents = &self.cpts[i].parents;
        let name = &self.dag.nodes[i].name;
        if parents.is_empty() {
            format!("P({name})")
        } else {
            format!("P({name}|{})", parents.join(", "))
        }
    }
}

/// Left-aligns the first column and right-aligns the rest.
pub(crate) fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = " ".repeat(widths[c] - cell.chars().count());
            if c == 0 {
                line.push_str(cell);
                line.push_str(&pad);
            } else {
                line.push_str("  ");
                line.push_str(&pad);
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn combo_key(dag: &Dag, node: usize, mut row: usize) -> String {
    let parents = &dag.parents[node];
    let mut labels = vec![""; parents.len()];
    for (k, &p) in parents.iter().enumerate().rev() {
        let n = dag.nodes[p].states.len();
        labels[k] = &dag.nodes[p].states[row % n];
        row /= n;
    }
    labels.join(",")
}

/// Chain-rule terms of a network.
pub fn factorization<T: Scalar>(net: &BayesNet<T>) -> Vec<String> {
    net.factorization()
}

pub fn joint_probability<T: Scalar>(net: &BayesNet<T>, assignment: &BTreeMap<String, String>) -> Result<T> {
    net.joint_probability(assignment)
}

pub fn infer<T: Scalar>(net: &BayesNet<T>, query: &str, evidence: &BTreeMap<String, String>) -> Result<Vec<T>> {
    net.infer(query, evidence)
}

pub fn conditionally_independent<T: Scalar>(
    net: &BayesNet<T>,
    x: &str,
    y: &[&str],
    z: &[&str],
    tol: T,
) -> Result<bool> {
    net.conditionally_independent(x, y, z, tol)
}

pub fn export_net_dot<T: Scalar>(net: &BayesNet<T>) -> String {
    net.to_dot()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(name: &str) -> Variable {
        Variable::new(name, ["F", "T"])
    }

    fn alarm_dag() -> Dag {
        let nodes = ["h", "e", "r", "s", "d", "w", "g"].map(bin).to_vec();
        Dag::new(
            nodes,
            &[("e", "s"), ("h", "s"), ("e", "r"), ("s", "d"), ("s", "w"), ("s", "g")],
        )
        .unwrap()
    }

    #[test]
    fn topological_order() {
        assert!(check_acyclic(&Dag::new(vec![], &[]).unwrap()).unwrap().is_empty());
        assert_eq!(
            check_acyclic(&alarm_dag()).unwrap(),
            ["h", "e", "r", "s", "d", "w", "g"]
        );
        let cyc = Dag::new(vec![bin("a"), bin("b")], &[("a", "b"), ("b", "a")]).unwrap();
        match check_acyclic(&cyc) {
            Err(Error::Cycle(c)) => assert_eq!(c.len(), 3),
            other => panic!("{other:?}"),
        }
        assert!(Dag::new(vec![bin("a")], &[("a", "z")]).is_err());
        assert!(Dag::new(vec![bin("a"), bin("b")], &[("a", "b"), ("a", "b")]).is_err());
    }

    #[test]
    fn alarm_factorization_and_json() {
        let spec = NetSpec {
            nodes: alarm_dag().nodes().to_vec(),
            arcs: alarm_dag().arcs().map(|(p, c)| [p.into(), c.into()]).collect(),
            cpts: BTreeMap::new(),
        };
        assert!(BayesNet::<f64>::from_spec(&spec).is_err());
        let dag = alarm_dag();
        let cpts = dag
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let rows = 1 << dag.parents_of(i).len();
                Cpt {
                    node: v.name.clone(),
                    parents: dag.parents_of(i).iter().map(|&p| dag.nodes()[p].name.clone()).collect(),
                    rows: (0..rows)
                        .map(|r| vec![0.25 + 0.1 * r as f64, 0.75 - 0.1 * r as f64])
                        .collect(),
                }
            })
            .collect();
        let net = BayesNet::new(dag, cpts).unwrap();
        assert_eq!(
            net.factorization().concat(),
            "P(h)P(e)P(r|e)P(s|e, h)P(d|s)P(w|s)P(g|s)"
        );
        let json = serde_json::to_string(&net.to_spec()).unwrap();
        let back = BayesNet::<f64>::from_json(&json).unwrap();
        assert_eq!(back, net);
        assert_eq!(
            net.to_spec().cpts["s"].keys().collect::<Vec<_>>(),
            ["F,F", "F,T", "T,F", "T,T"]
        );
        let dot = net.to_dot();
        assert_eq!(dot.matches(" -> ").count(), 6);
    }

    #[test]
    fn root_prior_and_chain_inference() {
        let dag = Dag::new(vec![bin("a"), bin("b")], &[("a", "b")]).unwrap();
        let net = BayesNet::new(
            dag,
            vec![
                Cpt {
                    node: "a".into(),
                    parents: vec![],
                    rows: vec![vec![0.7, 0.3]],
                },
                Cpt {
                    node: "b".into(),
                    parents: vec!["a".into()],
                    rows: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                },
            ],
        )
        .unwrap();
        assert_eq!(net.infer("a", &BTreeMap::new()).unwrap(), vec![0.7, 0.3]);
        let ev = BTreeMap::from([("b".to_string(), "T".to_string())]);
        assert_eq!(net.infer("a", &ev).unwrap(), vec![0.0, 1.0]);
        let full = BTreeMap::from([("a".to_string(), "T".to_string()), ("b".to_string(), "T".to_string())]);
        assert!((net.joint_probability(&full).unwrap() - 0.3f64).abs() < 1e-15);
        assert!(net
            .infer("a", &BTreeMap::from([("a".to_string(), "T".to_string())]))
            .is_err());
    }
}
