//! Identification queries and their half-space piece decompositions.
//!
//! Each problem exposes an answer function, the pieces of an answer's
//! alternative, closed-form infima of the likelihood ratio per piece, and a
//! compact active-piece state for elimination stopping. A brute-force
//! enumeration over all answers is kept as an oracle for small instances.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BanditInstance, HalfSpace, Projection, Statistics, RIDGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemKind {
    Bai,
    #[serde(rename = "topm")]
    TopM {
        m: usize,
    },
    Osi,
}

/// An identification query over `k` arms. OSI thresholds at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    kind: ProblemKind,
    k: usize,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 arms, got {k}")));
        }
        if let ProblemKind::TopM { m } = kind {
            if m == 0 || m >= k {
                return Err(Error::InvalidConfig(format!("top-m requires 1 <= m < K, got m={m}, K={k}")));
            }
        }
        Ok(Self { kind, k })
    }

    pub fn bai(k: usize) -> Result<Self> {
        Self::new(ProblemKind::Bai, k)
    }

    pub fn top_m(k: usize, m: usize) -> Result<Self> {
        Self::new(ProblemKind::TopM { m }, k)
    }

    pub fn osi(k: usize) -> Result<Self> {
        Self::new(ProblemKind::Osi, k)
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ProblemKind::Bai => "bai",
            ProblemKind::TopM { .. } => "topm",
            ProblemKind::Osi => "osi",
        }
    }

    /// `|P(i)|`, identical for every answer.
    pub fn piece_count(&self) -> usize {
        match self.kind {
            ProblemKind::Bai => self.k - 1,
            ProblemKind::TopM { m } => m * (self.k - m),
            ProblemKind::Osi => self.k,
        }
    }

    /// Correct answer for the given arm means.
    pub fn answer_of(&self, means: &[f64]) -> AnswerOf {
        debug_assert_eq!(means.len(), self.k);
        match self.kind {
            ProblemKind::Bai => {
                let mut best = 0;
                for (j, &x) in means.iter().enumerate().skip(1) {
                    if x > means[best] {
                        best = j;
                    }
                }
                let tied = means.iter().enumerate().any(|(j, &x)| j != best && x == means[best]);
                AnswerOf { answer: Answer::Arm(best), tied }
            }
            ProblemKind::TopM { m } => {
                let order = ranked(means);
                let tied = means[order[m - 1]] == means[order[m]];
                let mut set = order[..m].to_vec();
                set.sort_unstable();
                AnswerOf { answer: Answer::Set(set), tied }
            }
            ProblemKind::Osi => AnswerOf {
                answer: Answer::Signs(means.iter().map(|&x| x >= 0.0).collect()),
                tied: means.contains(&0.0),
            },
        }
    }

    /// Answer for parameter `theta` of `inst`.
    pub fn answer_for(&self, inst: &BanditInstance, theta: &DVector<f64>) -> AnswerOf {
        self.answer_of(&inst.means_under(theta))
    }

    /// Pieces `P(i)` in increasing id order.
    pub fn pieces(&self, answer: &Answer) -> Vec<PieceId> {
        match answer {
            Answer::Arm(i) => (0..self.k).filter(|j| j != i).map(PieceId::Arm).collect(),
            Answer::Set(set) => {
                let inside = membership(self.k, set);
                let mut out = Vec::with_capacity(self.piece_count());
                for &j in set {
                    for k in (0..self.k).filter(|&k| !inside[k]) {
                        out.push(PieceId::Pair { inside: j, outside: k });
                    }
                }
                out
            }
            Answer::Signs(s) => (0..s.len()).map(PieceId::Sign).collect(),
        }
    }

    /// Closure of `Λ_p(i)` as a half-space.
    pub fn half_space(&self, answer: &Answer, piece: PieceId) -> HalfSpace {
        match (answer, piece) {
            (Answer::Arm(i), PieceId::Arm(j)) => HalfSpace::Pair { a: *i, b: j },
            (Answer::Set(_), PieceId::Pair { inside, outside }) => HalfSpace::Pair { a: inside, b: outside },
            (Answer::Signs(s), PieceId::Sign(p)) => HalfSpace::Sign { arm: p, nonpositive: s[p] },
            _ => panic!("piece {piece:?} does not belong to answer {answer:?}"),
        }
    }

    /// Whether `lambda` lies in the open piece `Λ_p(i)`.
    pub fn piece_contains(&self, inst: &BanditInstance, answer: &Answer, piece: PieceId, lambda: &DVector<f64>) -> bool {
        let mu = |k: usize| inst.feature(k).dot(lambda);
        match self.half_space(answer, piece) {
            HalfSpace::Pair { a, b } => mu(b) > mu(a),
            HalfSpace::Sign { arm, nonpositive: true } => mu(arm) < 0.0,
            HalfSpace::Sign { arm, nonpositive: false } => mu(arm) >= 0.0,
        }
    }
}

fn ranked(means: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(a.cmp(&b)));
    order
}

fn membership(k: usize, set: &[usize]) -> Vec<bool> {
    let mut inside = vec![false; k];
    for &j in set {
        inside[j] = true;
    }
    inside
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    /// Best arm.
    Arm(usize),
    /// Top-m set, sorted ascending.
    Set(Vec<usize>),
    /// `true` where the mean is nonnegative.
    Signs(Vec<bool>),
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Answer::Arm(i) => write!(f, "{i}"),
            Answer::Set(s) => {
                let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(" "))
            }
            Answer::Signs(s) => {
                let bits: String = s.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "{bits}")
            }
        }
    }
}

/// Result of [`ProblemSpec::answer_of`]; `tied` flags an exact tie broken toward the lowest index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerOf {
    pub answer: Answer,
    pub tied: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PieceId {
    /// BAI: arm `j` beats the answer.
    Arm(usize),
    /// TopM: arm `outside` beats arm `inside`.
    Pair { inside: usize, outside: usize },
    /// OSI: the sign of arm `p` differs from the answer.
    Sign(usize),
}

impl PieceId {
    pub fn kind(&self) -> &'static str {
        match self {
            PieceId::Arm(_) => "arm",
            PieceId::Pair { .. } => "pair",
            PieceId::Sign(_) => "sign",
        }
    }
}

/// `inf_{λ ∈ Λ_p(i)} ½‖θ̂ − λ‖²_V` and its minimizer.
pub fn inf_llr_piece(
    spec: &ProblemSpec,
    inst: &BanditInstance,
    stats: &Statistics,
    answer: &Answer,
    piece: PieceId,
) -> Projection {
    stats.inverse().project(inst, stats.theta_hat(), spec.half_space(answer, piece))
}

/// Value part of [`inf_llr_piece`].
pub fn inf_llr_value(spec: &ProblemSpec, inst: &BanditInstance, stats: &Statistics, answer: &Answer, piece: PieceId) -> f64 {
    stats.inverse().value(inst, stats.theta_hat(), spec.half_space(answer, piece))
}

const NAIVE_TOL: f64 = 1e-9;
const NAIVE_MAX_ITER: usize = 1_000_000;

/// Accelerated projected-gradient minimization of `½‖θ̂ − λ‖²_{V+ridge}`
/// over the closed piece, independent of the closed forms. Test oracle.
pub fn naive_inf_llr(
    spec: &ProblemSpec,
    inst: &BanditInstance,
    stats: &Statistics,
    answer: &Answer,
    piece: PieceId,
) -> Result<f64> {
    let d = inst.d();
    let metric = stats.design() + DMatrix::<f64>::identity(d, d) * RIDGE;
    let theta = stats.theta_hat().clone();
    let u = match spec.half_space(answer, piece) {
        HalfSpace::Pair { a, b } => inst.feature(a) - inst.feature(b),
        HalfSpace::Sign { arm, nonpositive: true } => inst.feature(arm).clone(),
        HalfSpace::Sign { arm, nonpositive: false } => -inst.feature(arm),
    };
    let uu = u.dot(&u);
    let project = |y: DVector<f64>| {
        let g = u.dot(&y);
        if g > 0.0 && uu > 0.0 {
            y - &u * (g / uu)
        } else {
            y
        }
    };
    let objective = |l: &DVector<f64>| {
        let diff = &theta - l;
        (&metric * &diff).dot(&diff) / 2.0
    };
    let lipschitz = metric.symmetric_eigenvalues().max().max(RIDGE);
    let step = 1.0 / lipschitz;

    let residual_at = |x: &DVector<f64>| {
        let g = &metric * (x - &theta);
        (x - project(x - g * step)).norm() * lipschitz
    };
    let mut x = project(theta.clone());
    let mut y = x.clone();
    let mut momentum = 1.0f64;
    let mut prev_obj = objective(&x);
    let mut residual = residual_at(&x);
    let tol = NAIVE_TOL * 1e-1 * (lipschitz * theta.norm()).max(1.0);
    for _ in 0..NAIVE_MAX_ITER {
        if residual <= tol {
            return Ok(prev_obj);
        }
        let grad = &metric * (&y - &theta);
        let next = project(&y - grad * step);
        // Gradient-based adaptive restart; objective comparisons stall at rounding level.
        if (&y - &next).dot(&(&next - &x)) > 0.0 && momentum > 1.0 {
            y = x.clone();
            momentum = 1.0;
            continue;
        }
        let obj = objective(&next);
        let m_next = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
        y = &next + (&next - &x) * ((momentum - 1.0) / m_next);
        momentum = m_next;
        x = next;
        prev_obj = obj;
        residual = residual_at(&x);
    }
    Err(Error::NoConvergence { iterations: NAIVE_MAX_ITER, residual })
}

/// Outcome of one active-piece update.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Update {
    pub eliminated: Vec<PieceId>,
    /// Number of piece infima evaluated.
    pub evaluations: u64,
}

/// Compact encoding of the un-eliminated pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActivePieceState {
    /// Arms not yet shown suboptimal. `winner` is set if the set empties.
    Bai { active: Vec<bool>, n_active: usize, winner: Option<usize> },
    /// `worse[j][k]`: arm `k` shown worse than arm `j`. Decided arms are frozen.
    TopM { m: usize, worse: Vec<Vec<bool>>, worse_len: Vec<usize>, decided: Vec<bool>, n_decided: usize },
    /// Arms with undecided sign, and the recorded sign of decided arms.
    Osi { undecided: Vec<bool>, n_undecided: usize, signs: Vec<Option<bool>> },
}

impl ActivePieceState {
    /// All pieces active.
    pub fn init(spec: &ProblemSpec) -> Self {
        let k = spec.k;
        match spec.kind {
            ProblemKind::Bai => ActivePieceState::Bai { active: vec![true; k], n_active: k, winner: None },
            ProblemKind::TopM { m } => ActivePieceState::TopM {
                m,
                worse: vec![vec![false; k]; k],
                worse_len: vec![0; k],
                decided: vec![false; k],
                n_decided: 0,
            },
            ProblemKind::Osi => ActivePieceState::Osi { undecided: vec![true; k], n_undecided: k, signs: vec![None; k] },
        }
    }

    /// Whether `piece` is still active in every answer that owns it.
    pub fn is_active(&self, piece: PieceId) -> bool {
        match (self, piece) {
            (ActivePieceState::Bai { active, .. }, PieceId::Arm(j)) => active[j],
            (ActivePieceState::TopM { worse, decided, .. }, PieceId::Pair { inside, outside }) => {
                !decided[inside] && !worse[inside][outside]
            }
            (ActivePieceState::Osi { undecided, .. }, PieceId::Sign(p)) => undecided[p],
            _ => panic!("piece {piece:?} does not match the state"),
        }
    }

    /// Active pieces of `answer`, in increasing id order.
    pub fn active_pieces(&self, spec: &ProblemSpec, answer: &Answer) -> Vec<PieceId> {
        spec.pieces(answer).into_iter().filter(|&p| self.is_active(p)).collect()
    }

    /// Number of active pieces in the compact encoding.
    pub fn size(&self) -> usize {
        match self {
            ActivePieceState::Bai { n_active, .. } => *n_active,
            ActivePieceState::TopM { worse_len, decided, .. } => {
                let k = decided.len();
                (0..k).filter(|&j| !decided[j]).map(|j| k - 1 - worse_len[j]).sum()
            }
            ActivePieceState::Osi { n_undecided, .. } => *n_undecided,
        }
    }

    /// Tests only the active pieces of the empirical answer.
    pub fn update_selective(&mut self, spec: &ProblemSpec, inst: &BanditInstance, stats: &Statistics, beta: f64) -> Update {
        let emp = spec.answer_for(inst, stats.theta_hat()).answer;
        let metric = stats.inverse();
        let theta = stats.theta_hat();
        let mut out = Update::default();
        match self {
            ActivePieceState::Bai { active, n_active, winner } => {
                let Answer::Arm(i) = emp else { unreachable!() };
                for j in 0..active.len() {
                    if j == i || !active[j] {
                        continue;
                    }
                    out.evaluations += 1;
                    if metric.value(inst, theta, HalfSpace::Pair { a: i, b: j }) >= beta {
                        active[j] = false;
                        *n_active -= 1;
                        out.eliminated.push(PieceId::Arm(j));
                    }
                }
                if *n_active == 0 {
                    *winner = Some(i);
                }
            }
            ActivePieceState::TopM { m, worse, worse_len, decided, n_decided } => {
                let Answer::Set(set) = emp else { unreachable!() };
                let k = worse.len();
                let inside = membership(k, &set);
                for &j in &set {
                    if decided[j] {
                        continue;
                    }
                    for o in 0..k {
                        if inside[o] || worse[j][o] {
                            continue;
                        }
                        out.evaluations += 1;
                        if metric.value(inst, theta, HalfSpace::Pair { a: j, b: o }) >= beta {
                            worse[j][o] = true;
                            worse_len[j] += 1;
                            out.eliminated.push(PieceId::Pair { inside: j, outside: o });
                        }
                    }
                    if settle_topm(j, *m, worse, worse_len, decided, n_decided, &mut out.eliminated) {
                        break;
                    }
                }
            }
            ActivePieceState::Osi { .. } => self.update_osi(inst, stats, beta, &mut out),
        }
        out
    }

    /// Tests pieces of every answer.
    pub fn update_full(&mut self, spec: &ProblemSpec, inst: &BanditInstance, stats: &Statistics, beta: f64) -> Update {
        let metric = stats.inverse();
        let theta = stats.theta_hat();
        let mut out = Update::default();
        match self {
            ActivePieceState::Bai { active, n_active, winner } => {
                let k = active.len();
                for j in 0..k {
                    if !active[j] {
                        continue;
                    }
                    for i in (0..k).filter(|&i| i != j) {
                        out.evaluations += 1;
                        if metric.value(inst, theta, HalfSpace::Pair { a: i, b: j }) >= beta {
                            active[j] = false;
                            *n_active -= 1;
                            out.eliminated.push(PieceId::Arm(j));
                            break;
                        }
                    }
                }
                if *n_active == 0 {
                    let Answer::Arm(i) = spec.answer_for(inst, theta).answer else { unreachable!() };
                    *winner = Some(i);
                }
            }
            ActivePieceState::TopM { m, worse, worse_len, decided, n_decided } => {
                let k = worse.len();
                for j in 0..k {
                    if decided[j] {
                        continue;
                    }
                    for o in 0..k {
                        if o == j || worse[j][o] {
                            continue;
                        }
                        out.evaluations += 1;
                        if metric.value(inst, theta, HalfSpace::Pair { a: j, b: o }) >= beta {
                            worse[j][o] = true;
                            worse_len[j] += 1;
                            out.eliminated.push(PieceId::Pair { inside: j, outside: o });
                        }
                    }
                    if settle_topm(j, *m, worse, worse_len, decided, n_decided, &mut out.eliminated) {
                        break;
                    }
                }
            }
            ActivePieceState::Osi { .. } => self.update_osi(inst, stats, beta, &mut out),
        }
        out
    }

    fn update_osi(&mut self, inst: &BanditInstance, stats: &Statistics, beta: f64, out: &mut Update) {
        let ActivePieceState::Osi { undecided, n_undecided, signs } = self else { unreachable!() };
        let metric = stats.inverse();
        let theta = stats.theta_hat();
        for p in 0..undecided.len() {
            if !undecided[p] {
                continue;
            }
            let sign = inst.feature(p).dot(theta) >= 0.0;
            out.evaluations += 1;
            if metric.value(inst, theta, HalfSpace::Sign { arm: p, nonpositive: sign }) >= beta {
                undecided[p] = false;
                *n_undecided -= 1;
                signs[p] = Some(sign);
                out.eliminated.push(PieceId::Sign(p));
            }
        }
    }

    /// The identified answer once some answer has no active piece left.
    pub fn is_stopped(&self) -> Option<Answer> {
        match self {
            ActivePieceState::Bai { active, n_active, winner } => match (*n_active, winner) {
                (0, Some(w)) => Some(Answer::Arm(*w)),
                (1, _) => active.iter().position(|&a| a).map(Answer::Arm),
                _ => None,
            },
            ActivePieceState::TopM { m, decided, n_decided, .. } => (*n_decided >= *m).then(|| {
                Answer::Set((0..decided.len()).filter(|&j| decided[j]).collect())
            }),
            ActivePieceState::Osi { n_undecided, signs, .. } => {
                (*n_undecided == 0).then(|| Answer::Signs(signs.iter().map(|s| s.expect("decided")).collect()))
            }
        }
    }

    /// Piece-wise intersection of two active sets over the same problem.
    pub fn intersect(&mut self, other: &ActivePieceState) {
        match (self, other) {
            (ActivePieceState::Bai { active, n_active, winner }, ActivePieceState::Bai { active: b, winner: wb, .. }) => {
                for (x, &y) in active.iter_mut().zip(b) {
                    *x &= y;
                }
                *n_active = active.iter().filter(|&&x| x).count();
                if winner.is_none() {
                    *winner = *wb;
                }
            }
            (
                ActivePieceState::TopM { worse, worse_len, decided, n_decided, .. },
                ActivePieceState::TopM { worse: wb, decided: db, .. },
            ) => {
                for j in 0..worse.len() {
                    for o in 0..worse.len() {
                        worse[j][o] |= wb[j][o];
                    }
                    worse_len[j] = worse[j].iter().filter(|&&x| x).count();
                    decided[j] |= db[j];
                }
                *n_decided = decided.iter().filter(|&&x| x).count();
            }
            (
                ActivePieceState::Osi { undecided, n_undecided, signs },
                ActivePieceState::Osi { undecided: ub, signs: sb, .. },
            ) => {
                for p in 0..undecided.len() {
                    undecided[p] &= ub[p];
                    if signs[p].is_none() {
                        signs[p] = sb[p];
                    }
                }
                *n_undecided = undecided.iter().filter(|&&x| x).count();
            }
            _ => panic!("cannot intersect states of different problems"),
        }
    }
}

/// Freezes arm `j` once `K − m` arms are shown worse. Returns true when `m` arms are decided.
fn settle_topm(
    j: usize,
    m: usize,
    worse: &[Vec<bool>],
    worse_len: &[usize],
    decided: &mut [bool],
    n_decided: &mut usize,
    eliminated: &mut Vec<PieceId>,
) -> bool {
    let k = worse.len();
    if !decided[j] && worse_len[j] >= k - m {
        decided[j] = true;
        *n_decided += 1;
        for o in (0..k).filter(|&o| o != j && !worse[j][o]) {
            eliminated.push(PieceId::Pair { inside: j, outside: o });
        }
    }
    *n_decided >= m
}

/// Literal per-answer bookkeeping over every answer, for tiny instances.
#[derive(Debug, Clone)]
pub struct NaiveEnumeration {
    spec: ProblemSpec,
    answers: Vec<Answer>,
    pieces: Vec<Vec<PieceId>>,
    active: Vec<Vec<bool>>,
}

impl NaiveEnumeration {
    /// Enumerates all answers. Limited to BAI `K ≤ 5`, TopM `K ≤ 5, m ≤ 2`, OSI `K ≤ 4`.
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        let k = spec.k;
        let answers: Vec<Answer> = match spec.kind {
            ProblemKind::Bai if k <= 5 => (0..k).map(Answer::Arm).collect(),
            ProblemKind::TopM { m } if k <= 5 && m <= 2 => subsets(k, m).into_iter().map(Answer::Set).collect(),
            ProblemKind::Osi if k <= 4 => {
                (0..1usize << k).map(|bits| Answer::Signs((0..k).map(|p| bits >> p & 1 == 1).collect())).collect()
            }
            _ => return Err(Error::TooLarge(format!("{} with K={k}", spec.name()))),
        };
        let pieces: Vec<Vec<PieceId>> = answers.iter().map(|a| spec.pieces(a)).collect();
        let active = pieces.iter().map(|p| vec![true; p.len()]).collect();
        Ok(Self { spec: *spec, answers, pieces, active })
    }

    pub fn answers(&self) -> &[Answer] {
        &self.answers
    }

    fn test(&mut self, idx: usize, inst: &BanditInstance, stats: &Statistics, beta: f64) -> bool {
        let answer = &self.answers[idx];
        for (slot, &piece) in self.pieces[idx].iter().enumerate() {
            if self.active[idx][slot] && inf_llr_value(&self.spec, inst, stats, answer, piece) >= beta {
                self.active[idx][slot] = false;
            }
        }
        self.active[idx].iter().all(|&a| !a)
    }

    /// Selective rule: only the empirical answer's pieces are tested.
    pub fn step_selective(&mut self, inst: &BanditInstance, stats: &Statistics, beta: f64) -> Option<Answer> {
        let emp = self.spec.answer_for(inst, stats.theta_hat()).answer;
        let idx = self.answers.iter().position(|a| *a == emp).expect("enumerated");
        self.test(idx, inst, stats, beta).then_some(emp)
    }

    /// Full rule: every answer is tested; the empirical answer wins ties, then the lowest index.
    pub fn step_full(&mut self, inst: &BanditInstance, stats: &Statistics, beta: f64) -> Option<Answer> {
        let emp = self.spec.answer_for(inst, stats.theta_hat()).answer;
        let mut emptied = Vec::new();
        for idx in 0..self.answers.len() {
            if self.test(idx, inst, stats, beta) {
                emptied.push(idx);
            }
        }
        let pick = emptied.iter().find(|&&i| self.answers[i] == emp).or(emptied.first());
        pick.map(|&i| self.answers[i].clone())
    }
}

/// One step of the enumeration oracle under the selective or full rule.
/// The per-answer history lives in `naive`; the stopped answer is returned.
pub fn naive_stop_check(naive: &mut NaiveEnumeration, full: bool, inst: &BanditInstance, stats: &Statistics, beta: f64) -> Option<Answer> {
    if full {
        naive.step_full(inst, stats, beta)
    } else {
        naive.step_selective(inst, stats, beta)
    }
}

fn subsets(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for j in start..k {
            cur.push(j);
            rec(j + 1, k, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, m, &mut Vec::new(), &mut out);
    out
}
