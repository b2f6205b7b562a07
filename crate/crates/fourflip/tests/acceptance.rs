//! Acceptance checks. Every check writes one `PASS` or `FAIL` line straight
//! to stdout (not captured by the test harness) and then asserts.
//!
//! The two benchmark-file checks are ignored by default because they need
//! external data and run for 10 and 60 minutes. Run them with
//! `cargo test --release -p fourflip --test acceptance -- --ignored`, with
//! `FOURFLIP_DATA_DIR` pointing at a directory that holds `rail507`,
//! `scpnrg1` and `rail2536` (defaults to `data/orlib` in the workspace).

use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use fourflip::gen::{generate, CostRange, GenConfig, GenKind};
use fourflip::solve::{solve, SolveOptions};
use fourflip::Format;
use fourflip_core::neighbor::NeighborList;
use fourflip_core::oracle::{brute_force, naive_neighbor_row, naive_ztilde};
use fourflip_core::search::search_nb1;
use fourflip_core::weighting::{UpdateKind, WeightUpdate, BETA_MIN};
use fourflip_core::{FnlsOutcome, Incumbent, Instance, PenaltyWeights, SearchState, Sense, Solution, WlsObserver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REL_TOL: f64 = 1e-9;

fn verdict(name: &str, ok: bool, detail: &str) {
    let line = format!("{} {name}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "{name}: {detail}");
}

fn same(a: f64, b: f64, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
    }
}

/// Mixed-sense instance with `m` in 5..=15 and `n` in 8..=25. Rows that end
/// up uncovered get a zero right-hand side.
fn mixed_instance(rng: &mut ChaCha8Rng, density: f64, integer: bool) -> Instance {
    let m = rng.random_range(5..=15);
    let n = rng.random_range(8..=25);
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut col: Vec<usize> = (0..m).filter(|_| rng.random_bool(density)).collect();
        if col.is_empty() {
            col.push(rng.random_range(0..m));
        }
        columns.push(col);
    }
    let mut degree = vec![0u32; m];
    for col in &columns {
        for &i in col {
            degree[i] += 1;
        }
    }
    let senses: Vec<Sense> = (0..m).map(|_| [Sense::Le, Sense::Ge, Sense::Eq][rng.random_range(0..3)]).collect();
    let rhs = degree.iter().map(|&d| rng.random_range(0..=d.min(3))).collect();
    let costs = (0..n)
        .map(|_| {
            if integer {
                rng.random_range(-5..=20) as f64
            } else {
                rng.random_range(-5.0..20.0)
            }
        })
        .collect();
    Instance::from_columns(senses, rhs, costs, columns).unwrap()
}

fn mixed_weights(rng: &mut ChaCha8Rng, inst: &Instance, integer: bool) -> PenaltyWeights {
    let m = inst.num_rows();
    let mut draw = || {
        if integer {
            rng.random_range(1..=30) as f64
        } else {
            rng.random_range(0.5..30.0)
        }
    };
    let plus = (0..m).map(|_| draw()).collect();
    let minus = (0..m).map(|_| draw()).collect();
    PenaltyWeights::from_vecs(inst, plus, minus).unwrap()
}

/// The fifty instances shared by the evaluation checks: densities alternate
/// between 0.2 and 0.5 and every other pair uses fractional data.
fn evaluation_suite() -> Vec<(Instance, PenaltyWeights, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    (0..50)
        .map(|k| {
            let density = if k % 2 == 0 { 0.2 } else { 0.5 };
            let integer = k % 4 < 2;
            let inst = mixed_instance(&mut rng, density, integer);
            let w = mixed_weights(&mut rng, &inst, integer);
            (inst, w, integer)
        })
        .collect()
}

fn random_state<'a>(rng: &mut ChaCha8Rng, inst: &'a Instance, w: &PenaltyWeights) -> SearchState<'a> {
    let bits: Vec<bool> = (0..inst.num_cols()).map(|_| rng.random_bool(0.5)).collect();
    SearchState::new(inst, Solution::from_bits(&bits), w.clone()).unwrap()
}

#[test]
fn incremental_evaluation_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mismatches = 0usize;
    let mut checks = 0usize;
    for (inst, w, integer) in evaluation_suite() {
        let mut st = random_state(&mut rng, &inst, &w);
        for _ in 0..500 {
            st.apply_flip(rng.random_range(0..inst.num_cols()));
            let mut fresh = st.clone();
            fresh.recompute_all();
            let naive = naive_ztilde(&inst, st.solution().bits(), &w);
            let mut ok = st.activity() == fresh.activity()
                && same(st.ztilde(), fresh.ztilde(), integer)
                && same(st.ztilde(), naive, integer);
            for j in 0..inst.num_cols() {
                let (p, q) = st.gain_parts(j);
                let (fp, fq) = fresh.gain_parts(j);
                ok &= same(p, fp, integer) && same(q, fq, integer);
            }
            checks += 1;
            mismatches += usize::from(!ok);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "incremental-evaluation-equivalence",
        mismatches == 0 && secs < 60.0,
        &format!("{checks} flips checked, {mismatches} mismatches, {secs:.1}s (limit 60s)"),
    );
}

#[test]
fn gain_formula_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut singles, mut pairs, mut quads, mut bad) = (0usize, 0usize, 0usize, 0usize);
    for (inst, w, integer) in evaluation_suite() {
        let n = inst.num_cols();
        let mut st = random_state(&mut rng, &inst, &w);
        while st.solution().count() < 2 || n - st.solution().count() < 2 {
            st = random_state(&mut rng, &inst, &w);
        }
        let base = st.ztilde();
        let measure = |st: &mut SearchState<'_>, cols: &[usize]| {
            for &j in cols {
                st.apply_flip(j);
            }
            let d = st.ztilde() - base;
            for &j in cols.iter().rev() {
                st.apply_flip(j);
            }
            d
        };
        for j in 0..n {
            let g = st.flip_gain(j);
            singles += 1;
            bad += usize::from(!same(g, measure(&mut st, &[j]), integer));
        }
        let ones: Vec<usize> = (0..n).filter(|&j| st.contains(j)).collect();
        let zeros: Vec<usize> = (0..n).filter(|&j| !st.contains(j)).collect();
        for &j1 in &ones {
            for &j2 in &zeros {
                let g = st.pair_gain(j1, j2).unwrap();
                pairs += 1;
                bad += usize::from(!same(g, measure(&mut st, &[j1, j2]), integer));
            }
        }
        let mut sampled = 0;
        while sampled < 10_000 {
            let (j1, j3) = (ones[rng.random_range(0..ones.len())], ones[rng.random_range(0..ones.len())]);
            let (j2, j4) = (zeros[rng.random_range(0..zeros.len())], zeros[rng.random_range(0..zeros.len())]);
            if j1 == j3 || j2 == j4 {
                continue;
            }
            sampled += 1;
            let g = st.quad_gain(j1, j2, j3, j4).unwrap();
            bad += usize::from(!same(g, measure(&mut st, &[j1, j2, j3, j4]), integer));
        }
        quads += sampled;
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "gain-formula-equivalence",
        bad == 0 && secs < 300.0,
        &format!("{singles} single, {pairs} pair, {quads} quadruple gains checked, {bad} mismatches, {secs:.1}s (limit 300s)"),
    );
}

#[test]
fn pair_pruning_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut states, mut checked, mut violations) = (0usize, 0usize, 0usize);
    while states < 100 {
        let density = if states % 2 == 0 { 0.2 } else { 0.5 };
        let inst = mixed_instance(&mut rng, density, true);
        let w = mixed_weights(&mut rng, &inst, true);
        let mut st = random_state(&mut rng, &inst, &w);
        while let Some((j, _)) = search_nb1(&st) {
            st.apply_flip(j);
        }
        states += 1;
        let n = inst.num_cols();
        for j1 in 0..n {
            for j2 in j1 + 1..n {
                let disjoint = !inst.col(j1).iter().any(|i| inst.col(j2).contains(i));
                if !disjoint && st.contains(j1) != st.contains(j2) {
                    continue;
                }
                let before = st.ztilde();
                st.apply_flip(j1);
                st.apply_flip(j2);
                let d = st.ztilde() - before;
                st.apply_flip(j2);
                st.apply_flip(j1);
                checked += 1;
                violations += usize::from(d < 0.0);
            }
        }
    }
    verdict(
        "pair-pruning-property",
        violations == 0,
        &format!("{states} 1-flip optimal states, {checked} pairs checked, {violations} improving"),
    );
}

#[test]
fn neighbor_list_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut rows, mut mismatches, mut truncated) = (0usize, 0usize, 0usize);
    for k in 0..50 {
        let cfg = GenConfig {
            rows: rng.random_range(5..=30),
            cols: rng.random_range(20..=120),
            density: [0.05, 0.1, 0.3][k % 3],
            costs: CostRange { lo: 1, hi: 20 },
            kind: GenKind::Cover,
            seed: rng.random(),
        };
        let inst = generate(&cfg).unwrap();
        let alpha = [5.0, 1.0, 0.3, 0.1, 0.05][k % 5];
        let mut nl = NeighborList::new(&inst, alpha).unwrap();
        let n = inst.num_cols();
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        for j in order {
            let got: Vec<(usize, u32)> = nl.row(&inst, j).iter().collect();
            let want = naive_neighbor_row(&inst, j, nl.cap());
            let full = naive_neighbor_row(&inst, j, usize::MAX).len();
            truncated += usize::from(want.len() < full);
            rows += 1;
            mismatches += usize::from(got != want);
        }
    }
    verdict(
        "neighbor-list-correctness",
        mismatches == 0,
        &format!("{rows} rows compared ({truncated} truncated), {mismatches} mismatches"),
    );
}

/// Independent checks of the outer loop, fed by the observer hooks.
struct TraceCheck<'a> {
    inst: &'a Instance,
    z_star: f64,
    bits: Vec<bool>,
    plus: Vec<f64>,
    minus: Vec<f64>,
    current: f64,
    updates: usize,
    decreases_checked: usize,
    violations: usize,
    errors: Vec<String>,
}

impl<'a> TraceCheck<'a> {
    fn new(inst: &'a Instance) -> Self {
        TraceCheck {
            inst,
            z_star: f64::INFINITY,
            bits: Vec::new(),
            plus: Vec::new(),
            minus: Vec::new(),
            current: f64::NAN,
            updates: 0,
            decreases_checked: 0,
            violations: 0,
            errors: Vec::new(),
        }
    }

    /// Counts a violation and keeps the first few messages.
    fn fail(&mut self, message: String) {
        self.violations += 1;
        if self.errors.len() < 5 {
            self.errors.push(message);
        }
    }

    fn ztilde_with(&self, bits: &[bool], plus: &[f64], minus: &[f64]) -> f64 {
        let w = PenaltyWeights::from_vecs(self.inst, plus.to_vec(), minus.to_vec()).unwrap();
        naive_ztilde(self.inst, bits, &w)
    }

    /// Removal gain `z~(x - j) - z~(x)` for every `j` in `X`, summed row by
    /// row from the definition of the penalty.
    fn removal_gains(&self, plus: &[f64], minus: &[f64]) -> Vec<(usize, f64)> {
        let activity: Vec<i64> = (0..self.inst.num_rows())
            .map(|i| self.inst.row(i).iter().filter(|&&j| self.bits[j as usize]).count() as i64)
            .collect();
        let row_penalty = |i: usize, s: i64| {
            let b = self.inst.rhs(i) as i64;
            let sense = self.inst.sense(i);
            let over = if sense.has_upper() { plus[i] * (s - b).max(0) as f64 } else { 0.0 };
            let under = if sense.has_lower() { minus[i] * (b - s).max(0) as f64 } else { 0.0 };
            over + under
        };
        (0..self.bits.len())
            .filter(|&j| self.bits[j])
            .map(|j| {
                let penalty: f64 = self
                    .inst
                    .col(j)
                    .iter()
                    .map(|&i| {
                        let i = i as usize;
                        row_penalty(i, activity[i] - 1) - row_penalty(i, activity[i])
                    })
                    .sum();
                (j, penalty - self.inst.cost(j))
            })
            .collect()
    }
}

impl WlsObserver for TraceCheck<'_> {
    fn on_call(&mut self, _call: u64, _outcome: &FnlsOutcome, st: &SearchState<'_>) {
        self.bits = st.solution().bits().to_vec();
        self.plus = st.weights().plus_all().to_vec();
        self.minus = st.weights().minus_all().to_vec();
        let v = self.inst.validate(&self.bits).unwrap();
        self.current = if v.is_feasible() {
            v.objective
        } else {
            self.ztilde_with(&self.bits, &self.plus, &self.minus)
        };
    }

    fn on_incumbent(&mut self, inc: &Incumbent) {
        if inc.objective > self.z_star {
            self.fail(format!("incumbent rose from {} to {}", self.z_star, inc.objective));
        }
        let v = self.inst.validate(Solution::from_members(self.inst.num_cols(), &inc.members).bits()).unwrap();
        if !v.is_feasible() || v.objective != inc.objective {
            self.fail("incumbent fails validation".into());
        }
        self.z_star = self.z_star.min(inc.objective);
    }

    fn on_weight_update(&mut self, u: &WeightUpdate, st: &SearchState<'_>) {
        self.updates += 1;
        if st.solution().bits() != &self.bits[..] {
            self.fail(format!("call {}: weight update moved the solution", u.call));
        }
        if u.z_star != self.z_star || !same(u.ztilde, self.current, false) {
            self.fail(format!("call {}: trace values disagree with recomputation", u.call));
        }
        // Within round-off of z* either branch is a faithful reading of
        // the tie rule.
        let band = 2.0 * REL_TOL * self.z_star.abs().max(1.0);
        let tie = self.z_star.is_finite() && (self.current - self.z_star).abs() <= band;
        let should_decrease = self.current >= self.z_star;
        let new_plus = st.weights().plus_all();
        let new_minus = st.weights().minus_all();
        match u.kind {
            UpdateKind::Decrease { beta, choice } => {
                if !should_decrease && !tie {
                    self.fail(format!("call {}: decreased although {} < {}", u.call, self.current, self.z_star));
                }
                let scaled = |old: &[f64], new: &[f64]| old.iter().zip(new).all(|(o, n)| *n == o * beta);
                if !(beta > 0.0 && beta < 1.0) || !scaled(&self.plus, new_plus) || !scaled(&self.minus, new_minus) {
                    self.fail(format!("call {}: decrease is not a uniform scaling by {beta}", u.call));
                }
                let Some(choice) = choice else { return };
                let size = self.bits.iter().filter(|&&b| b).count();
                let t = (size as f64 * 0.1).ceil() as usize;
                let thresholds = self
                    .removal_gains(&self.plus, &self.minus)
                    .into_iter()
                    .filter(|&(j, d)| {
                        let c = self.inst.cost(j);
                        c > 0.0 && d + c > 0.0
                    })
                    .count();
                if thresholds != choice.thresholds || t.max(1) != choice.target {
                    self.fail(format!("call {}: threshold bookkeeping differs", u.call));
                }
                if thresholds >= t && !choice.fallback && beta > BETA_MIN {
                    self.decreases_checked += 1;
                    let negative = self.removal_gains(new_plus, new_minus).iter().filter(|p| p.1 < 0.0).count();
                    if negative < t {
                        self.fail(format!("call {}: only {negative} of {size} removals improve, need {t}", u.call));
                    }
                }
            }
            UpdateKind::Increase(inc) => {
                if should_decrease && !tie {
                    self.fail(format!("call {}: increased although {} >= {}", u.call, self.current, self.z_star));
                }
                let w = st.weights();
                let mut denom = 0.0;
                let mut viol = Vec::new();
                for i in 0..self.inst.num_rows() {
                    let s = self.inst.row(i).iter().filter(|&&j| self.bits[j as usize]).count() as f64;
                    let b = self.inst.rhs(i) as f64;
                    let sense = self.inst.sense(i);
                    let yp = if sense.has_upper() { (s - b).max(0.0) } else { 0.0 };
                    let ym = if sense.has_lower() { (b - s).max(0.0) } else { 0.0 };
                    denom += yp * yp + ym * ym;
                    viol.push((yp, ym));
                }
                let step = if denom > 0.0 { (self.z_star - self.current) / denom } else { 0.0 };
                let step_ok = if step.is_infinite() {
                    inc.step == step
                } else {
                    (step - inc.step).abs() <= REL_TOL * self.z_star.abs().max(1.0)
                };
                if !step_ok {
                    self.fail(format!("call {}: step {} differs from {step}", u.call, inc.step));
                }
                for (i, &(yp, ym)) in viol.iter().enumerate() {
                    let want_p = if yp > 0.0 { (self.plus[i] + step * yp).min(w.original_plus()[i]) } else { self.plus[i] };
                    let want_m = if ym > 0.0 { (self.minus[i] + step * ym).min(w.original_minus()[i]) } else { self.minus[i] };
                    if !same(new_plus[i], want_p, false) || !same(new_minus[i], want_m, false) {
                        self.fail(format!("call {}: row {i} weight does not follow the increase rule", u.call));
                    }
                }
            }
        }
    }
}

struct OracleRun {
    optimum: Option<f64>,
    found: Option<f64>,
    trace_errors: Vec<String>,
    violations: usize,
    updates: usize,
    decreases_checked: usize,
}

/// One hundred small covering instances solved for two seconds each; shared
/// by the optimality and control-flow checks.
fn oracle_runs() -> &'static [OracleRun] {
    static RUNS: std::sync::OnceLock<Vec<OracleRun>> = std::sync::OnceLock::new();
    RUNS.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let configs: Vec<GenConfig> = (0..100)
            .map(|_| GenConfig {
                rows: rng.random_range(6..=12),
                cols: rng.random_range(10..=20),
                density: rng.random_range(0.15..0.35),
                costs: CostRange { lo: 1, hi: 20 },
                kind: GenKind::Cover,
                seed: rng.random(),
            })
            .collect();
        let workers = std::thread::available_parallelism().map_or(1, |p| p.get());
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots: Vec<std::sync::Mutex<Option<OracleRun>>> = configs.iter().map(|_| Default::default()).collect();
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    let Some(cfg) = configs.get(k) else { break };
                    let inst = generate(cfg).unwrap();
                    let optimum = brute_force(&inst).unwrap().optimum.map(|o| o.0);
                    let mut trace = TraceCheck::new(&inst);
                    let opts = SolveOptions {
                        time_limit_secs: 2.0,
                        ..SolveOptions::default()
                    };
                    let found = solve(&inst, "gen", "bip", &opts, &mut trace).unwrap().report.objective;
                    *slots[k].lock().unwrap() = Some(OracleRun {
                        optimum,
                        found,
                        violations: trace.violations,
                        trace_errors: trace.errors,
                        updates: trace.updates,
                        decreases_checked: trace.decreases_checked,
                    });
                });
            }
        });
        slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
    })
}

#[test]
fn oracle_optimality() {
    let runs = oracle_runs();
    let matched = runs.iter().filter(|r| r.found.is_some() && r.found == r.optimum).count();
    let below = runs
        .iter()
        .filter(|r| matches!((r.found, r.optimum), (Some(f), Some(o)) if f < o) || (r.found.is_some() && r.optimum.is_none()))
        .count();
    let missing = runs.iter().filter(|r| r.found.is_none()).count();
    verdict(
        "oracle-optimality",
        matched >= 90 && below == 0,
        &format!("{matched}/100 optimal (need 90), {below} below optimum or infeasible, {missing} without a feasible solution"),
    );
}

#[test]
fn weighting_control_flow() {
    let runs = oracle_runs();
    let errors: Vec<&String> = runs.iter().flat_map(|r| &r.trace_errors).collect();
    let violations: usize = runs.iter().map(|r| r.violations).sum();
    let updates: usize = runs.iter().map(|r| r.updates).sum();
    let checked: usize = runs.iter().map(|r| r.decreases_checked).sum();
    let first = errors.first().map_or(String::new(), |e| format!("; first: {e}"));
    verdict(
        "weighting-control-flow",
        violations == 0 && updates > 0 && checked > 0,
        &format!("{updates} weight updates traced, {checked} decreases checked for the 10% rule, {violations} violations{first}"),
    );
}

fn data_file(name: &str) -> Result<Vec<u8>, String> {
    let dir = std::env::var_os("FOURFLIP_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/orlib"));
    let path = dir.join(name);
    std::fs::read(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn benchmark(name: &str, format: Format, secs: f64) -> Result<fourflip::SolveReport, String> {
    let inst = format.parse(&data_file(name)?).map_err(|e| format!("{name}: {e}"))?;
    let opts = SolveOptions {
        time_limit_secs: secs,
        ..SolveOptions::default()
    };
    solve(&inst, name, format.name(), &opts, &mut ()).map(|r| r.report).map_err(|e| e.to_string())
}

#[test]
#[ignore = "needs rail507 and scpnrg1 and runs for 20 minutes"]
fn benchmark_scp_quality() {
    let rail = benchmark("rail507", Format::ScpCol, 600.0);
    let g1 = benchmark("scpnrg1", Format::ScpRow, 600.0);
    let (ok, detail) = match (rail, g1) {
        (Ok(r), Ok(g)) => {
            let (zr, zg) = (r.objective.unwrap_or(f64::INFINITY), g.objective.unwrap_or(f64::INFINITY));
            let ok = zr <= 176.0 && zg <= 166.4 * 1.02;
            (ok, format!("rail507 objective {zr} (need <= 176), scpnrg1 objective {zg} (need <= {:.3})", 166.4 * 1.02))
        }
        (r, g) => (false, [r.err(), g.err()].into_iter().flatten().collect::<Vec<_>>().join("; ")),
    };
    verdict("benchmark-scp-quality", ok, &detail);
}

#[test]
#[ignore = "needs rail2536 and runs for one hour"]
fn benchmark_lazy_statistics() {
    let (ok, detail) = match benchmark("rail2536", Format::ScpCol, 3600.0) {
        Ok(r) => (
            r.generated_row_ratio_pct < 20.0 && r.fnls_calls > 0,
            format!(
                "generated-row ratio {:.2}% (need < 20%), {} local search calls",
                r.generated_row_ratio_pct, r.fnls_calls
            ),
        ),
        Err(e) => (false, e),
    };
    verdict("benchmark-lazy-statistics", ok, &detail);
}
