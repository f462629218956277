//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the verdicts always reach stdout.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};

use explora::bayes::{fit_naive_bayes, BayesNet, Cpt, Dag, Variable};
use explora::dataset::{
    case_study_patterns, generate_contribuyentes, min_max_normalize, AttributeSchema, Relation, Value,
};
use explora::induction::{
    best_threshold, entropy, induce, info_gain, information_content, BranchTest, InduceConfig, Node, Rule, SplitTest,
};
use explora::pipeline::Plan;
use explora::som::{
    assign, feature_matrix, influence, init_grid, learning_rate, quantization_error, radius, time_constant, train,
    SomParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = Result<String, String>;
type Named<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn log2_entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.ln() / std::f64::consts::LN_2
        })
        .sum()
}

// ---- criterion 1 -----------------------------------------------------------

fn binary_relation(rows: &[Vec<usize>], p: usize) -> Relation {
    let mut schema: Vec<AttributeSchema> = (0..p)
        .map(|i| AttributeSchema::categorical(format!("x{i}"), ["a", "b"]))
        .collect();
    schema.push(AttributeSchema::categorical("c", ["A", "B"]));
    let records = rows
        .iter()
        .map(|r| r.iter().map(|&v| Value::Category(v)).collect())
        .collect();
    Relation::new(schema, records).unwrap()
}

#[derive(Debug)]
enum Greedy {
    Leaf(usize, usize),
    Split(usize, Vec<(usize, Greedy)>),
}

fn greedy(rows: &[Vec<usize>], attrs: &[usize], p: usize) -> Greedy {
    let mut counts = [0usize; 2];
    for r in rows {
        counts[r[p]] += 1;
    }
    let majority = usize::from(counts[1] > counts[0]);
    if counts[majority] == rows.len() || rows.len() < 2 {
        return Greedy::Leaf(majority, rows.len());
    }
    let h = log2_entropy(&counts);
    let mut best: Option<(usize, f64)> = None;
    for &a in attrs {
        let mut parts = [[0usize; 2]; 2];
        for r in rows {
            parts[r[a]][r[p]] += 1;
        }
        if parts.iter().any(|b| b[0] + b[1] == 0) {
            continue;
        }
        let g = h - parts
            .iter()
            .map(|b| (b[0] + b[1]) as f64 / rows.len() as f64 * log2_entropy(b))
            .sum::<f64>();
        if best.is_none_or(|(_, bg)| g > bg + 1e-12) {
            best = Some((a, g));
        }
    }
    match best {
        Some((a, g)) if g > 1e-12 => {
            let rest: Vec<usize> = attrs.iter().copied().filter(|&x| x != a).collect();
            let children = (0..2)
                .filter_map(|v| {
                    let sub: Vec<Vec<usize>> = rows.iter().filter(|r| r[a] == v).cloned().collect();
                    (!sub.is_empty()).then(|| (v, greedy(&sub, &rest, p)))
                })
                .collect();
            Greedy::Split(a, children)
        }
        _ => Greedy::Leaf(majority, rows.len()),
    }
}

fn same(node: &Node<f64>, oracle: &Greedy) -> bool {
    match (node, oracle) {
        (Node::Leaf { class, support, .. }, Greedy::Leaf(c, n)) => *class == ["A", "B"][*c] && support == n,
        (
            Node::Internal {
                split: SplitTest::Categorical { attr },
                branches,
                ..
            },
            Greedy::Split(a, kids),
        ) => {
            *attr == format!("x{a}")
                && branches.len() == kids.len()
                && branches.iter().zip(kids).all(|(b, (v, k))| {
                    matches!(&b.test, BranchTest::Equals { level, .. } if *level == ["a", "b"][*v]) && same(&b.node, k)
                })
        }
        _ => false,
    }
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..1000 {
        let p = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=8);
        let rows: Vec<Vec<usize>> = (0..n).map(|_| (0..=p).map(|_| rng.gen_range(0..2)).collect()).collect();
        let rel = binary_relation(&rows, p);
        let mut counts = [0usize; 2];
        rows.iter().for_each(|r| counts[r[p]] += 1);
        let h = log2_entropy(&counts);
        ensure!(
            (entropy::<f64>(&rel, "c").unwrap() - h).abs() <= 1e-12,
            "entropy differs on case {case}"
        );
        for a in 0..p {
            let mut parts = [[0usize; 2]; 2];
            rows.iter().for_each(|r| parts[r[a]][r[p]] += 1);
            let g = h - parts
                .iter()
                .map(|b| (b[0] + b[1]) as f64 / n as f64 * log2_entropy(b))
                .sum::<f64>();
            let got = info_gain::<f64>(&rel, "c", &format!("x{a}")).unwrap();
            ensure!(
                (got - g).abs() <= 1e-12,
                "gain of x{a} differs on case {case}: {got} vs {g}"
            );
        }
        let tree = induce::<f64>(&rel, "c", &InduceConfig::id3()).unwrap();
        let oracle = greedy(&rows, &(0..p).collect::<Vec<_>>(), p);
        ensure!(same(&tree.root, &oracle), "tree differs on case {case}: {oracle:?}");
    }
    Ok("1000 relations, gains within 1e-12, trees identical".into())
}

// ---- criterion 2 -----------------------------------------------------------

fn criterion_2() -> Check {
    let one = information_content::<f64>(&[0.5, 0.5]).unwrap();
    ensure!(one == 1.0, "I(1/2,1/2) = {one}");
    let h = information_content::<f64>(&[9.0 / 14.0, 5.0 / 14.0]).unwrap();
    ensure!((h - 0.940286).abs() <= 1e-6, "I(9/14,5/14) = {h}");
    let rel = Relation::new(
        vec![
            AttributeSchema::continuous("year"),
            AttributeSchema::categorical("c", ["A", "B"]),
        ],
        vec![
            vec![Value::Number(1971.0), Value::Category(0)],
            vec![Value::Number(1974.0), Value::Category(1)],
        ],
    )
    .unwrap();
    let (cut, gain) = best_threshold::<f64>(&rel, "c", "year").unwrap();
    ensure!(cut == 1972.5 && gain == 1.0, "cut {cut}, gain {gain}");
    Ok(format!("1 bit, {h:.6} bits, cut {cut} with gain {gain}"))
}

// ---- criterion 3 -----------------------------------------------------------

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let ni = rng.gen_range(1..5000);
        let rm = rng.gen_range(0.1..10.0);
        let s0 = rng.gen_range(0.1..5.0);
        let l0 = rng.gen_range(0.001..=1.0);
        let lambda = time_constant(ni, rm).unwrap();
        ensure!(
            radius(0, s0, lambda) == s0 && learning_rate(0, l0, lambda) == l0,
            "t=0 values"
        );
        for t in 0..ni {
            ensure!(
                radius(t + 1, s0, lambda) < radius(t, s0, lambda),
                "radius not decreasing at t={t}, NI={ni}"
            );
            ensure!(
                learning_rate(t + 1, l0, lambda) < learning_rate(t, l0, lambda),
                "rate not decreasing at t={t}"
            );
        }
        let sigma: f64 = rng.gen_range(1e-3..10.0);
        ensure!(influence(0.0, sigma).unwrap() == 1.0, "influence(0, {sigma}) != 1");
        let half = influence(sigma, sigma).unwrap();
        ensure!((half - (-0.5f64).exp()).abs() <= 1e-12, "influence(σ,σ) = {half}");
    }
    Ok("100 random schedules and radii".into())
}

// ---- criteria 4 and 5 ------------------------------------------------------

fn blobs(seed: u64) -> (Relation, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.06).unwrap();
    let centers = [(0.25, 0.25), (0.75, 0.7)];
    let mut labels = Vec::new();
    let mut records = Vec::new();
    for _ in 0..200 {
        let k = rng.gen_range(0..2);
        labels.push(k);
        records.push(vec![
            Value::Number(centers[k].0 + noise.sample(&mut rng)),
            Value::Number(centers[k].1 + noise.sample(&mut rng)),
        ]);
    }
    let schema = vec![AttributeSchema::continuous("x"), AttributeSchema::continuous("y")];
    (Relation::new(schema, records).unwrap(), labels)
}

fn criterion_4() -> Check {
    let (rel, labels) = blobs(11);
    let (_, scaler) = min_max_normalize(&rel, &["x", "y"]).unwrap();
    let data = feature_matrix::<f64>(&rel, &["x", "y"], &scaler).unwrap();
    let mut params = SomParams::<f64>::new(2, 1, 3);
    params.iterations = 5000;
    let q0 = quantization_error(&init_grid(&params, 2).unwrap(), &data).unwrap();
    let grid = train(&data, &params).unwrap();
    let q1 = quantization_error(&grid, &data).unwrap();
    ensure!(q1 < q0, "quantization error rose: {q0} -> {q1}");
    let (_, a) = assign(&grid, &rel, &["x", "y"], &scaler, "CSOM").unwrap();
    let mut table = [[0usize; 2]; 2];
    for (cell, &k) in a.cells.iter().zip(&labels) {
        table[k][cell.col] += 1;
    }
    let agree = (table[0][0] + table[1][1]).max(table[0][1] + table[1][0]) as f64 / 200.0;
    ensure!(agree >= 0.9, "agreement {agree}, table {table:?}");
    Ok(format!("error {q0:.4} -> {q1:.4}, agreement {:.1} %", agree * 100.0))
}

fn criterion_5() -> Check {
    let reference: usize = [57, 16, 32, 9].iter().sum();
    let mut runs = 0;
    for seed in 0..10 {
        let rel = generate_contribuyentes(seed, 114, &case_study_patterns()).unwrap();
        let feats = ["fechanac", "asinpresdj", "nroemple", "nrodenuncias", "cantcau"];
        let (_, scaler) = min_max_normalize(&rel, &feats).unwrap();
        let data = feature_matrix::<f64>(&rel, &feats, &scaler).unwrap();
        for (w, h) in [(1, 1), (2, 2), (3, 2)] {
            let grid = train(&data, &SomParams::new(w, h, seed)).unwrap();
            let (out, a) = assign(&grid, &rel, &feats, &scaler, "CSOM").unwrap();
            ensure!(
                a.counts.iter().sum::<usize>() == reference && a.cells.len() == reference,
                "seed {seed}: {:?}",
                a.counts
            );
            ensure!(
                out.len() == reference && out.arity() == rel.arity() + 1,
                "relation shape"
            );
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, counts sum to {reference}"))
}

// ---- criterion 6 -----------------------------------------------------------

fn dist(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn net_over(rng: &mut ChaCha8Rng, names: &[&str], states: &[usize], arcs: &[(usize, usize)]) -> BayesNet<f64> {
    let vars = names
        .iter()
        .zip(states)
        .map(|(n, &k)| Variable::new(*n, (0..k).map(|s| format!("s{s}"))))
        .collect();
    let named: Vec<(&str, &str)> = arcs.iter().map(|&(p, c)| (names[p], names[c])).collect();
    let dag = Dag::new(vars, &named).unwrap();
    let cpts = (0..names.len())
        .map(|i| {
            let parents: Vec<usize> = arcs.iter().filter(|a| a.1 == i).map(|a| a.0).collect();
            let combos: usize = parents.iter().map(|&p| states[p]).product();
            Cpt {
                node: names[i].to_string(),
                parents: parents.iter().map(|&p| names[p].to_string()).collect(),
                rows: (0..combos).map(|_| dist(rng, states[i])).collect(),
            }
        })
        .collect();
    BayesNet::new(dag, cpts).unwrap()
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let names = ["n0", "n1", "n2", "n3", "n4"];
    for case in 0..500 {
        let n = rng.gen_range(1..=5);
        let states: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let arcs: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let net = net_over(&mut rng, &names[..n], &states, &arcs);
        // full joint table, last node fastest
        let mut table: Vec<(Vec<usize>, f64)> = Vec::new();
        let mut x = vec![0usize; n];
        loop {
            let assignment = x
                .iter()
                .enumerate()
                .map(|(i, s)| (names[i].to_string(), format!("s{s}")))
                .collect();
            table.push((x.clone(), net.joint_probability(&assignment).unwrap()));
            let mut k = n;
            while k > 0 {
                k -= 1;
                x[k] += 1;
                if x[k] < states[k] {
                    break;
                }
                x[k] = 0;
            }
            if x.iter().all(|&v| v == 0) {
                break;
            }
        }
        let total: f64 = table.iter().map(|t| t.1).sum();
        ensure!((total - 1.0).abs() <= 1e-9, "case {case}: joint sums to {total}");
        let q = case % n;
        let e = (q + 1) % n;
        let ev_state = rng.gen_range(0..states[e]);
        let evidence = if e == q {
            BTreeMap::new()
        } else {
            BTreeMap::from([(names[e].to_string(), format!("s{ev_state}"))])
        };
        let mut mass = vec![0.0; states[q]];
        for (x, p) in &table {
            if e == q || x[e] == ev_state {
                mass[x[q]] += p;
            }
        }
        let z: f64 = mass.iter().sum();
        let got = net.infer(names[q], &evidence).unwrap();
        for (a, b) in got.iter().zip(&mass) {
            ensure!((a - b / z).abs() <= 1e-9, "case {case}: posterior {a} vs {}", b / z);
        }
    }

    let alarm = ["h", "e", "r", "s", "d", "w", "g"];
    let net = net_over(
        &mut rng,
        &alarm,
        &[2; 7],
        &[(1, 3), (0, 3), (1, 2), (3, 4), (3, 5), (3, 6)],
    );
    let terms = net.factorization().concat();
    ensure!(
        terms == "P(h)P(e)P(r|e)P(s|e, h)P(d|s)P(w|s)P(g|s)",
        "factorization {terms}"
    );

    let letters = ["A", "B", "C", "D", "E", "F", "G"];
    let arcs = [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (3, 5), (2, 6)];
    for _ in 0..20 {
        let net = net_over(&mut rng, &letters, &[2; 7], &arcs);
        let ok = net
            .conditionally_independent("E", &["A", "C", "D", "F", "G"], &["B"], 1e-9)
            .unwrap();
        ensure!(ok, "P(E|A..G) differs from P(E|B)");
    }
    Ok(format!(
        "500 nets; {terms}; E independent of A,C,D,F,G given B on 20 tables"
    ))
}

// ---- criterion 7 -----------------------------------------------------------

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..20 {
        let rel = generate_contribuyentes(seed, 114, &case_study_patterns()).unwrap();
        let feats = ["liquidez", "blanque-morat", "accionista", "donayoacred"];
        let smoothing = if seed % 2 == 0 { 0.0 } else { 1.0 };
        let m = fit_naive_bayes::<f64>(&rel, "supdompjur", &feats, smoothing).unwrap();
        ensure!((m.priors.iter().sum::<f64>() - 1.0).abs() <= 1e-9, "priors");
        for f in &m.features {
            for row in &f.table {
                ensure!(
                    (row.iter().sum::<f64>() - 1.0).abs() <= 1e-9,
                    "{} row sums to {}",
                    f.name,
                    row.iter().sum::<f64>()
                );
            }
        }
        let net = m.to_bayes_net().unwrap();
        for _ in 0..10 {
            let record: BTreeMap<String, String> = m
                .features
                .iter()
                .map(|f| (f.name.clone(), f.levels[rng.gen_range(0..f.levels.len())].clone()))
                .collect();
            if let (Ok(a), Ok(b)) = (m.posterior(&record), net.infer("supdompjur", &record)) {
                for (x, y) in a.iter().zip(&b) {
                    ensure!((x - y).abs() <= 1e-12, "posterior {x} vs star net {y}");
                }
            }
        }
        let report = m.report();
        let lines: Vec<&str> = report.lines().collect();
        ensure!(lines.len() == 3, "report has {} lines", lines.len());
        ensure!(
            lines[1].starts_with("P(NO|X)") && lines[2].starts_with("P(SI|X)"),
            "row labels"
        );
        for line in &lines[1..] {
            ensure!(line.split_whitespace().count() == 7, "row `{line}` is not 6 columns");
        }
    }
    Ok("20 fits normalized, star net agrees, 2 x 6 table".into())
}

// ---- criteria 8 and 9 ------------------------------------------------------

fn explora(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_explora"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn re_enact(dir: &Path) -> Result<(), String> {
    let data = dir.join("data");
    let out = dir.join("run");
    let plan = dir.join("plan.json");
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let gen = explora(&["gen", "--seed", "1", "--rows", "114", "-o", &s(&data)])?;
    ensure!(
        gen.status.code() == Some(0),
        "gen exited {:?}: {}",
        gen.status,
        String::from_utf8_lossy(&gen.stderr)
    );
    fs::write(&plan, serde_json::to_string_pretty(&Plan::case_study(1)).unwrap()).map_err(|e| e.to_string())?;
    let run = explora(&[
        "--no-timings",
        "pipeline",
        "--plan",
        &s(&plan),
        "--in",
        &s(&data),
        "-o",
        &s(&out),
    ])?;
    ensure!(
        run.status.code() == Some(0),
        "pipeline exited {:?}: {}",
        run.status,
        String::from_utf8_lossy(&run.stderr)
    );
    Ok(())
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn criterion_8(dir: &Path) -> Check {
    re_enact(dir)?;
    let out = dir.join("run");
    let counts = read(&out.join("csom_counts.txt"))?;
    let cells: Vec<usize> = counts
        .split('(')
        .skip(1)
        .map(|s| s.split(')').next().unwrap().parse().unwrap())
        .collect();
    ensure!(
        cells.len() == 4 && cells.iter().sum::<usize>() == 114,
        "count table:\n{counts}"
    );
    let rules_txt = read(&out.join("rules.txt"))?;
    ensure!(rules_txt.lines().count() >= 2, "empty rule list");
    let cpt = read(&out.join("cpt.txt"))?;
    ensure!(cpt.lines().count() == 3, "CPT table:\n{cpt}");
    for f in ["report.json", "tree.dot", "net.dot", "augmented.csv", "schema.json"] {
        ensure!(out.join(f).is_file(), "missing {f}");
    }

    let report: serde_json::Value =
        serde_json::from_str(&read(&out.join("report.json"))?).map_err(|e| e.to_string())?;
    let rules: Vec<Rule> = serde_json::from_value(report["stages"][1]["rules"].clone()).map_err(|e| e.to_string())?;
    let hit = |attr: &str, lo: f64, hi: f64| {
        rules.iter().any(|r| {
            r.confidence >= 0.8
                && r.conditions.iter().any(|c| match c {
                    BranchTest::Below { attr: a, cut } | BranchTest::AtLeast { attr: a, cut } => {
                        a == attr && *cut > lo && *cut <= hi
                    }
                    _ => false,
                })
        })
    };
    ensure!(hit("nroemple", 15.0, 16.0), "no nroemple cut in (15,16]:\n{rules_txt}");
    ensure!(hit("asinpresdj", 1.0, 2.0), "no asinpresdj cut in (1,2]:\n{rules_txt}");
    Ok(format!("cells {cells:?}, {} rules, 2-row CPT table", rules.len()))
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let bytes = fs::read(&path).map_err(|e| e.to_string())?;
        files.insert(path.file_name().unwrap().to_string_lossy().into_owned(), bytes);
    }
    Ok(files)
}

fn criterion_9(first: &Path, second: &Path) -> Check {
    re_enact(second)?;
    let mut compared = 0;
    for sub in ["data", "run"] {
        let a = snapshot(&first.join(sub))?;
        let b = snapshot(&second.join(sub))?;
        ensure!(a.keys().eq(b.keys()), "{sub}: file sets differ");
        for (name, bytes) in &a {
            ensure!(b[name] == *bytes, "{sub}/{name} differs");
            compared += 1;
        }
    }
    Ok(format!("{compared} artifacts byte-identical"))
}

fn main() -> ExitCode {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let checks: Vec<Named> = vec![
        ("entropy/gain oracle suite", Box::new(criterion_1)),
        ("analytic points", Box::new(criterion_2)),
        ("SOM schedule laws", Box::new(criterion_3)),
        ("SOM training on two blobs", Box::new(criterion_4)),
        ("assignment partition", Box::new(criterion_5)),
        ("Bayes suite", Box::new(criterion_6)),
        ("naive Bayes", Box::new(criterion_7)),
        ("case-study re-enactment", Box::new(|| criterion_8(first.path()))),
        ("determinism", Box::new(|| criterion_9(first.path(), second.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
