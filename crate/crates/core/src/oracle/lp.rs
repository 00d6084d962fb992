//! CPLEX-LP export of the two MIP models, a reader for the same dialect and
//! a substitution check of variable assignments against the rows.
//!
//! Node names: `o` and `d` are the start and end copies of the depot,
//! customers keep their ids. Variables:
//!
//! | name            | meaning                                        |
//! |-----------------|------------------------------------------------|
//! | `x_k_i_j`       | vehicle `k` drives arc `(i, j)`                |
//! | `w_k_i_j_l`     | MoP: job `j` follows `i` on machine `l` of `k` |
//! | `w_i_j_l`       | CP: job `j` follows `i` on depot machine `l`   |
//! | `v_k_i_l`/`v_i_l` | production start of `i` on machine `l`       |
//! | `s_k_i`         | service start of `i` by vehicle `k`            |
//! | `y_i`           | delay of customer `i`                          |

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{evaluate_cp, evaluate_mop, CpSolution, Instance, MopSolution, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct LpModel {
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<Row>,
    /// Variables with a lower bound other than 0, `None` meaning free.
    pub lower_bounds: Vec<(String, Option<f64>)>,
    pub binaries: Vec<String>,
    /// Every variable in declaration order.
    pub columns: Vec<String>,
}

impl LpModel {
    fn column(&mut self, name: String) -> String {
        self.columns.push(name.clone());
        name
    }

    fn row(&mut self, name: String, terms: Vec<(f64, String)>, sense: Sense, rhs: f64) {
        self.rows.push(Row { name, terms, sense, rhs });
    }

    /// Names of rows or bounds the assignment violates beyond `tol`.
    /// Missing variables count as 0.
    pub fn violated(&self, values: &HashMap<String, f64>, tol: f64) -> Vec<String> {
        let get = |v: &str| values.get(v).copied().unwrap_or(0.0);
        let mut out = Vec::new();
        for row in &self.rows {
            let lhs: f64 = row.terms.iter().map(|(a, v)| a * get(v)).sum();
            let ok = match row.sense {
                Sense::Le => lhs <= row.rhs + tol,
                Sense::Ge => lhs >= row.rhs - tol,
                Sense::Eq => (lhs - row.rhs).abs() <= tol,
            };
            if !ok {
                out.push(row.name.clone());
            }
        }
        let bounds: HashMap<&str, Option<f64>> = self.lower_bounds.iter().map(|(v, b)| (v.as_str(), *b)).collect();
        for col in &self.columns {
            let lower = bounds.get(col.as_str()).copied().unwrap_or(Some(0.0));
            if let Some(lb) = lower {
                if get(col) < lb - tol {
                    out.push(format!("bound:{col}"));
                }
            }
        }
        for b in &self.binaries {
            let x = get(b);
            if (x - x.round()).abs() > tol || !(-tol..=1.0 + tol).contains(&x) {
                out.push(format!("binary:{b}"));
            }
        }
        out
    }

    pub fn objective_value(&self, values: &HashMap<String, f64>) -> f64 {
        self.objective
            .iter()
            .map(|(a, v)| a * values.get(v).copied().unwrap_or(0.0))
            .sum()
    }

    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        out.push_str("Minimize\n obj:");
        push_terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            push_terms(&mut out, &row.terms);
            let _ = writeln!(out, " {} {}", row.sense.symbol(), fmt_num(row.rhs));
        }
        out.push_str("Bounds\n");
        for (v, lb) in &self.lower_bounds {
            match lb {
                Some(lb) => {
                    let _ = writeln!(out, " {} <= {v} <= +inf", fmt_num(*lb));
                }
                None => {
                    let _ = writeln!(out, " {v} free");
                }
            }
        }
        let binary: std::collections::HashSet<&str> = self.binaries.iter().map(String::as_str).collect();
        for v in self.columns.iter().filter(|c| !binary.contains(c.as_str())) {
            if !self.lower_bounds.iter().any(|(b, _)| b == v) {
                let _ = writeln!(out, " 0 <= {v} <= +inf");
            }
        }
        out.push_str("Binaries\n");
        for b in &self.binaries {
            let _ = writeln!(out, " {b}");
        }
        out.push_str("End\n");
        out
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

fn push_terms(out: &mut String, terms: &[(f64, String)]) {
    if terms.is_empty() {
        out.push_str(" 0 __zero");
        return;
    }
    for (k, (a, v)) in terms.iter().enumerate() {
        let sign = if *a < 0.0 { "-" } else if k > 0 { "+" } else { "" };
        let mag = a.abs();
        if sign.is_empty() {
            let _ = write!(out, " {} {v}", fmt_num(mag));
        } else {
            let _ = write!(out, " {sign} {} {v}", fmt_num(mag));
        }
    }
}

fn node(i: usize) -> String {
    i.to_string()
}

/// Arc endpoint; the depot reads as `o` when a tail and `d` when a head.
#[derive(Clone, Copy, PartialEq, Eq)]
enum End {
    Depot,
    Customer(usize),
}

fn tail_name(e: End) -> String {
    match e {
        End::Depot => "o".into(),
        End::Customer(c) => node(c),
    }
}

fn head_name(e: End) -> String {
    match e {
        End::Depot => "d".into(),
        End::Customer(c) => node(c),
    }
}

fn index(e: End) -> usize {
    match e {
        End::Depot => 0,
        End::Customer(c) => c,
    }
}

/// Arc set: `o` to every customer and to `d`, customer to customer, and
/// customer to `d`.
fn arcs(n: usize) -> Vec<(End, End)> {
    let mut out = Vec::new();
    for j in 1..=n {
        out.push((End::Depot, End::Customer(j)));
    }
    out.push((End::Depot, End::Depot));
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                out.push((End::Customer(i), End::Customer(j)));
            }
        }
        out.push((End::Customer(i), End::Depot));
    }
    out
}

fn x(k: usize, i: End, j: End) -> String {
    format!("x_{k}_{}_{}", tail_name(i), head_name(j))
}

/// Production-chain arc variable; `k = None` for depot machines.
fn w(k: Option<usize>, i: End, j: End, l: usize) -> String {
    match k {
        Some(k) => format!("w_{k}_{}_{}_{l}", tail_name(i), head_name(j)),
        None => format!("w_{}_{}_{l}", tail_name(i), head_name(j)),
    }
}

fn v_name(k: Option<usize>, i: &str, l: usize) -> String {
    match k {
        Some(k) => format!("v_{k}_{i}_{l}"),
        None => format!("v_{i}_{l}"),
    }
}

fn s_name(k: usize, i: &str) -> String {
    format!("s_{k}_{i}")
}

fn y_name(i: usize) -> String {
    format!("y_{i}")
}

/// Big-M of the model: `D + max(max p_i, max t_ij + e_i)`, widened by `H`
/// for CP since production may start at `-H`.
pub fn big_m(inst: &Instance, variant: Variant) -> f64 {
    let n = inst.num_customers();
    let max_p = inst.customers.iter().map(|c| c.production_time).fold(0.0, f64::max);
    let mut max_te = 0.0f64;
    for i in 0..=n {
        let e = if i == 0 { 0.0 } else { inst.customer(i).service_time };
        for j in 0..=n {
            if i != j {
                max_te = max_te.max(inst.t(i, j) + e);
            }
        }
    }
    let h = match variant {
        Variant::Mop => 0.0,
        Variant::Cp => inst.early_production,
    };
    inst.max_duration + h + max_p.max(max_te)
}

pub fn build_mip(inst: &Instance, variant: Variant) -> LpModel {
    let n = inst.num_customers();
    let kk = inst.num_vehicles;
    let e_arcs = arcs(n);
    let big = big_m(inst, variant);
    let mut lp = LpModel::default();
    let out_of = |i: End| e_arcs.iter().filter(move |a| a.0 == i).copied();
    let into = |j: End| e_arcs.iter().filter(move |a| a.1 == j).copied();
    let nodes: Vec<String> = std::iter::once("o".to_string())
        .chain((1..=n).map(node))
        .chain(std::iter::once("d".to_string()))
        .collect();

    // columns
    for k in 0..kk {
        for &(i, j) in &e_arcs {
            let name = lp.column(x(k, i, j));
            lp.binaries.push(name);
        }
    }
    let (machines, per_vehicle): (usize, bool) = match variant {
        Variant::Mop => (inst.machines_per_vehicle, true),
        Variant::Cp => (inst.depot_machines(), false),
    };
    let owners: Vec<Option<usize>> = if per_vehicle { (0..kk).map(Some).collect() } else { vec![None] };
    for &k in &owners {
        for l in 0..machines {
            for &(i, j) in &e_arcs {
                let name = lp.column(w(k, i, j, l));
                lp.binaries.push(name);
            }
        }
    }
    for &k in &owners {
        for l in 0..machines {
            for i in &nodes {
                let name = lp.column(v_name(k, i, l));
                if variant == Variant::Cp {
                    lp.lower_bounds.push((name, Some(-inst.early_production)));
                }
            }
        }
    }
    for k in 0..kk {
        for i in &nodes {
            lp.column(s_name(k, i));
        }
    }
    for i in 1..=n {
        lp.column(y_name(i));
    }

    // objective
    for k in 0..kk {
        for &(i, j) in &e_arcs {
            let c = inst.c(index(i), index(j));
            if c != 0.0 {
                lp.objective.push((inst.weights.travel * c, x(k, i, j)));
            }
        }
    }
    for i in 1..=n {
        lp.objective.push((inst.weights.delay, y_name(i)));
    }

    // routing
    for i in 1..=n {
        let ci = End::Customer(i);
        let terms = (0..kk).flat_map(|k| out_of(ci).map(move |(a, b)| (1.0, x(k, a, b)))).collect();
        lp.row(format!("visit_{i}"), terms, Sense::Eq, 1.0);
    }
    for k in 0..kk {
        let terms = out_of(End::Depot).map(|(a, b)| (1.0, x(k, a, b))).collect();
        lp.row(format!("leave_{k}"), terms, Sense::Eq, 1.0);
        let terms = into(End::Depot).map(|(a, b)| (1.0, x(k, a, b))).collect();
        lp.row(format!("return_{k}"), terms, Sense::Eq, 1.0);
        for i in 1..=n {
            let ci = End::Customer(i);
            let mut terms: Vec<(f64, String)> = out_of(ci).map(|(a, b)| (1.0, x(k, a, b))).collect();
            terms.extend(into(ci).map(|(a, b)| (-1.0, x(k, a, b))));
            lp.row(format!("flow_{k}_{i}"), terms, Sense::Eq, 0.0);
        }
        let mut terms = Vec::new();
        for i in 1..=n {
            let d = inst.customer(i).demand;
            if d != 0.0 {
                terms.extend(out_of(End::Customer(i)).map(|(a, b)| (d, x(k, a, b))));
            }
        }
        lp.row(format!("capacity_{k}"), terms, Sense::Le, inst.capacity);
    }

    // production chains
    match variant {
        Variant::Mop => {
            for k in 0..kk {
                for i in 1..=n {
                    let ci = End::Customer(i);
                    let mut terms: Vec<(f64, String)> = (0..machines)
                        .flat_map(|l| out_of(ci).map(move |(a, b)| (1.0, w(Some(k), a, b, l))))
                        .collect();
                    terms.extend(out_of(ci).map(|(a, b)| (-1.0, x(k, a, b))));
                    lp.row(format!("link_{k}_{i}"), terms, Sense::Eq, 0.0);
                }
            }
        }
        Variant::Cp => {
            for i in 1..=n {
                let ci = End::Customer(i);
                let terms = (0..machines)
                    .flat_map(|l| out_of(ci).map(move |(a, b)| (1.0, w(None, a, b, l))))
                    .collect();
                lp.row(format!("produce_{i}"), terms, Sense::Eq, 1.0);
            }
        }
    }
    for &k in &owners {
        let tag = k.map_or(String::new(), |k| format!("{k}_"));
        for l in 0..machines {
            let terms = out_of(End::Depot).map(|(a, b)| (1.0, w(k, a, b, l))).collect();
            lp.row(format!("chain_start_{tag}{l}"), terms, Sense::Eq, 1.0);
            for i in 1..=n {
                let ci = End::Customer(i);
                let mut terms: Vec<(f64, String)> = out_of(ci).map(|(a, b)| (1.0, w(k, a, b, l))).collect();
                terms.extend(into(ci).map(|(a, b)| (-1.0, w(k, a, b, l))));
                lp.row(format!("chain_flow_{tag}{l}_{i}"), terms, Sense::Eq, 0.0);
            }
            for &(i, j) in &e_arcs {
                let p = if let End::Customer(c) = i { inst.customer(c).production_time } else { 0.0 };
                let terms = vec![
                    (1.0, v_name(k, &head_name(j), l)),
                    (-1.0, v_name(k, &tail_name(i), l)),
                    (-big, w(k, i, j, l)),
                ];
                lp.row(
                    format!("prod_order_{tag}{l}_{}_{}", tail_name(i), head_name(j)),
                    terms,
                    Sense::Ge,
                    p - big,
                );
            }
        }
    }

    // production before service
    for k in 0..kk {
        for i in 1..=n {
            let p = inst.customer(i).production_time;
            let ci = End::Customer(i);
            for l in 0..machines {
                match variant {
                    Variant::Mop => {
                        let terms = vec![(1.0, s_name(k, &node(i))), (-1.0, v_name(Some(k), &node(i), l))];
                        lp.row(format!("prod_serve_{k}_{i}_{l}"), terms, Sense::Ge, p);
                    }
                    Variant::Cp => {
                        let mut terms = vec![(1.0, s_name(k, "o")), (-1.0, v_name(None, &node(i), l))];
                        terms.extend(out_of(ci).map(|(a, b)| (-big, x(k, a, b))));
                        lp.row(format!("prod_depart_{k}_{i}_{l}"), terms, Sense::Ge, p - big);
                    }
                }
            }
        }
    }

    // timing, windows, duration, delay
    for k in 0..kk {
        for &(i, j) in &e_arcs {
            let e = if let End::Customer(c) = i { inst.customer(c).service_time } else { 0.0 };
            let t = inst.t(index(i), index(j));
            let terms = vec![
                (1.0, s_name(k, &head_name(j))),
                (-1.0, s_name(k, &tail_name(i))),
                (-big, x(k, i, j)),
            ];
            lp.row(
                format!("travel_{k}_{}_{}", tail_name(i), head_name(j)),
                terms,
                Sense::Ge,
                t + e - big,
            );
        }
        for i in 1..=n {
            lp.row(
                format!("window_{k}_{i}"),
                vec![(1.0, s_name(k, &node(i)))],
                Sense::Ge,
                inst.customer(i).tw_start,
            );
        }
        lp.row(format!("duration_{k}"), vec![(1.0, s_name(k, "d"))], Sense::Le, inst.max_duration);
        for i in 1..=n {
            lp.row(
                format!("delay_{k}_{i}"),
                vec![(1.0, y_name(i)), (-1.0, s_name(k, &node(i)))],
                Sense::Ge,
                -inst.customer(i).tw_end,
            );
        }
    }
    lp
}

pub fn export_mip(inst: &Instance, variant: Variant) -> String {
    let mut out = format!("\\ {} model for instance {}\n", variant.to_string().to_uppercase(), inst.id);
    out.push_str(&build_mip(inst, variant).to_lp_string());
    out
}

/// Sets `x` for the routes, with unused vehicles on the `o -> d` arc.
fn route_arcs(values: &mut HashMap<String, f64>, routes: &[Vec<usize>], kk: usize) {
    for k in 0..kk {
        let route = routes.get(k).map_or(&[][..], |r| r.as_slice());
        let mut prev = End::Depot;
        for &c in route {
            values.insert(x(k, prev, End::Customer(c)), 1.0);
            prev = End::Customer(c);
        }
        values.insert(x(k, prev, End::Depot), 1.0);
    }
}

fn chain_arcs(values: &mut HashMap<String, f64>, k: Option<usize>, l: usize, jobs: &[usize]) {
    let mut prev = End::Depot;
    for &c in jobs {
        values.insert(w(k, prev, End::Customer(c), l), 1.0);
        prev = End::Customer(c);
    }
    values.insert(w(k, prev, End::Depot, l), 1.0);
}

/// Variable assignment of a MoP solution. Vehicles that do not visit a
/// customer still carry `s = max(a_i, p_i)` for it, since the window,
/// production and delay rows bind every vehicle.
pub fn mop_assignment(inst: &Instance, sol: &MopSolution) -> HashMap<String, f64> {
    let tl = evaluate_mop(inst, sol).expect("assignment needs a valid solution");
    let n = inst.num_customers();
    let kk = inst.num_vehicles;
    let m = inst.machines_per_vehicle;
    let mut values = HashMap::new();
    route_arcs(&mut values, &sol.routes, kk);
    let orders = sol.inline_orders(m);
    for k in 0..kk {
        for l in 0..m {
            let jobs = orders.get(k).map_or(&[][..], |o| o[l].as_slice());
            chain_arcs(&mut values, Some(k), l, jobs);
            let end = jobs.last().map_or(0.0, |&c| tl.visits[c].as_ref().unwrap().prod_end);
            values.insert(v_name(Some(k), "d", l), end);
            for &c in jobs {
                values.insert(v_name(Some(k), &node(c), l), tl.visits[c].as_ref().unwrap().prod_start);
            }
        }
        values.insert(s_name(k, "o"), tl.route_departure.get(k).copied().unwrap_or(0.0));
        values.insert(s_name(k, "d"), tl.route_return.get(k).copied().unwrap_or(0.0));
        for i in 1..=n {
            let visit = tl.visits[i].as_ref().unwrap();
            let s = if visit.route == k {
                visit.service_start
            } else {
                let c = inst.customer(i);
                c.tw_start.max(c.production_time)
            };
            values.insert(s_name(k, &node(i)), s);
        }
    }
    for i in 1..=n {
        values.insert(y_name(i), tl.visits[i].as_ref().unwrap().delay);
    }
    values
}

/// Variable assignment of a CP solution. A job's start on machines that do
/// not produce it is set to its route's departure minus its production time.
pub fn cp_assignment(inst: &Instance, sol: &CpSolution) -> HashMap<String, f64> {
    let tl = evaluate_cp(inst, sol).expect("assignment needs a valid solution");
    let n = inst.num_customers();
    let kk = inst.num_vehicles;
    let mut values = HashMap::new();
    route_arcs(&mut values, &sol.routes, kk);
    for (l, jobs) in sol.machine_jobs.iter().enumerate() {
        chain_arcs(&mut values, None, l, jobs);
        values.insert(v_name(None, "o", l), -inst.early_production);
        let end = jobs
            .last()
            .map_or(-inst.early_production, |&c| tl.visits[c].as_ref().unwrap().prod_end);
        values.insert(v_name(None, "d", l), end);
        for i in 1..=n {
            let visit = tl.visits[i].as_ref().unwrap();
            let v = if jobs.contains(&i) {
                visit.prod_start
            } else {
                tl.route_departure[visit.route] - inst.customer(i).production_time
            };
            values.insert(v_name(None, &node(i), l), v);
        }
    }
    for k in 0..kk {
        values.insert(s_name(k, "o"), tl.route_departure.get(k).copied().unwrap_or(0.0));
        values.insert(s_name(k, "d"), tl.route_return.get(k).copied().unwrap_or(0.0));
        for i in 1..=n {
            let visit = tl.visits[i].as_ref().unwrap();
            let s = if visit.route == k {
                visit.service_start
            } else {
                inst.customer(i).tw_start
            };
            values.insert(s_name(k, &node(i)), s);
        }
    }
    for i in 1..=n {
        values.insert(y_name(i), tl.visits[i].as_ref().unwrap().delay);
    }
    values
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("LP parse error at line {line}: {message}")]
pub struct LpParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

fn parse_terms(tokens: &[&str], line: usize) -> Result<Vec<(f64, String)>, LpParseError> {
    let err = |message: String| LpParseError { line, message };
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for &tok in tokens {
        match tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(value) = tok.parse::<f64>() {
                    if coef.is_some() {
                        return Err(err(format!("two coefficients in a row near {tok}")));
                    }
                    coef = Some(value);
                } else {
                    let a = sign * coef.take().unwrap_or(1.0);
                    if tok != "__zero" {
                        terms.push((a, tok.to_string()));
                    }
                    sign = 1.0;
                }
            }
        }
    }
    if coef.is_some() {
        return Err(err("dangling coefficient".into()));
    }
    Ok(terms)
}

/// Reads the subset of CPLEX-LP that [`export_mip`] writes: one objective,
/// one constraint per line, lower bounds, free variables and binaries.
pub fn parse_lp(text: &str) -> Result<LpModel, LpParseError> {
    let mut lp = LpModel::default();
    let mut section = Section::None;
    let mut seen = std::collections::HashSet::new();
    let mut note = |lp: &mut LpModel, v: &str| {
        if seen.insert(v.to_string()) {
            lp.columns.push(v.to_string());
        }
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let err = |message: &str| LpParseError {
            line: line_no,
            message: message.to_string(),
        };
        match line.to_ascii_lowercase().as_str() {
            "minimize" => {
                section = Section::Objective;
                continue;
            }
            "subject to" => {
                section = Section::Constraints;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "binaries" => {
                section = Section::Binaries;
                continue;
            }
            "end" => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None | Section::End => return Err(err("content outside a section")),
            Section::Objective => {
                let (_, body) = line.split_once(':').ok_or_else(|| err("objective needs a name"))?;
                let tokens: Vec<&str> = body.split_whitespace().collect();
                lp.objective = parse_terms(&tokens, line_no)?;
                for (_, v) in lp.objective.clone() {
                    note(&mut lp, &v);
                }
            }
            Section::Constraints => {
                let (name, body) = line.split_once(':').ok_or_else(|| err("constraint needs a name"))?;
                let tokens: Vec<&str> = body.split_whitespace().collect();
                let pos = tokens
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "="))
                    .ok_or_else(|| err("missing relation"))?;
                let sense = match tokens[pos] {
                    "<=" => Sense::Le,
                    ">=" => Sense::Ge,
                    _ => Sense::Eq,
                };
                if tokens.len() != pos + 2 {
                    return Err(err("expected a single right-hand side"));
                }
                let rhs: f64 = tokens[pos + 1].parse().map_err(|_| err("bad right-hand side"))?;
                let terms = parse_terms(&tokens[..pos], line_no)?;
                for (_, v) in &terms {
                    note(&mut lp, v);
                }
                lp.rows.push(Row {
                    name: name.trim().to_string(),
                    terms,
                    sense,
                    rhs,
                });
            }
            Section::Bounds => {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                match tokens.as_slice() {
                    [v, "free"] => {
                        note(&mut lp, v);
                        lp.lower_bounds.push((v.to_string(), None));
                    }
                    [lb, "<=", v, "<=", "+inf"] => {
                        let lb: f64 = lb.parse().map_err(|_| err("bad bound"))?;
                        note(&mut lp, v);
                        if lb != 0.0 {
                            lp.lower_bounds.push((v.to_string(), Some(lb)));
                        }
                    }
                    _ => return Err(err("unsupported bound")),
                }
            }
            Section::Binaries => {
                for v in line.split_whitespace() {
                    note(&mut lp, v);
                    lp.binaries.push(v.to_string());
                }
            }
        }
    }
    if section != Section::End {
        return Err(LpParseError {
            line: text.lines().count(),
            message: "missing End".into(),
        });
    }
    Ok(lp)
}
