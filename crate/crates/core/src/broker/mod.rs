//! The broker contract as a deterministic state machine.
//!
//! A client escrows a fee, one worker escrows collateral, and the job settles
//! either by a verified proof delivered on time (worker takes both) or by
//! failure or timeout (client takes both). All tokens live either in account
//! balances or in per-job escrow, and every operation moves them between the
//! two without creating or destroying any; only [`Broker::mint`] adds supply.
//!
//! Every call, successful or not, appends one [`Transition`] to the log.
//! Failed calls change nothing but the log.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::proof::{verify_bytes, BilinearGroup, MockGroup, VerificationKey};


pub type JobId = u64;
pub type Tick = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JobState {
    Open,
    Registered,
    ProofSubmitted,
    Paid,
    Slashed,
    Cancelled,
}

impl JobState {
    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            JobState::Paid | JobState::Slashed | JobState::Cancelled
        )
    }
}

impl fmt::Display for JobState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JobState::Open => "OPEN",
            JobState::Registered => "REGISTERED",
            JobState::ProofSubmitted => "PROOF_SUBMITTED",
            JobState::Paid => "PAID",
            JobState::Slashed => "SLASHED",
            JobState::Cancelled => "CANCELLED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrokerError {
    #[error("{account} has {available} tokens, needs {needed}")]
    InsufficientBalance {
        account: String,
        needed: u64,
        available: u64,
    },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("verification key does not decode: {0}")]
    InvalidKey(String),
    #[error("no job {0}")]
    UnknownJob(JobId),
    #[error("job {job} is {state}, not OPEN")]
    JobNotOpen { job: JobId, state: JobState },
    #[error("job {job} is {state}, not REGISTERED")]
    JobNotRegistered { job: JobId, state: JobState },
    #[error("{caller} is not the worker of job {job}")]
    NotTheWorker { job: JobId, caller: String },
    #[error("{caller} is not the client of job {job}")]
    NotTheClient { job: JobId, caller: String },
    #[error("job {job} deadline {deadline} has not passed at tick {tick}")]
    DeadlineNotPassed {
        job: JobId,
        deadline: Tick,
        tick: Tick,
    },
    #[error("clock cannot move back from {now} to {requested}")]
    ClockBackwards { now: Tick, requested: Tick },
    #[error("token supply overflow")]
    SupplyOverflow,
}

impl BrokerError {
    /// The variant name, used in the transition log.
    pub fn kind(&self) -> &'static str {
        match self {
            BrokerError::InsufficientBalance { .. } => "InsufficientBalance",
            BrokerError::InvalidParameters(_) => "InvalidParameters",
            BrokerError::InvalidKey(_) => "InvalidKey",
            BrokerError::UnknownJob(_) => "UnknownJob",
            BrokerError::JobNotOpen { .. } => "JobNotOpen",
            BrokerError::JobNotRegistered { .. } => "JobNotRegistered",
            BrokerError::NotTheWorker { .. } => "NotTheWorker",
            BrokerError::NotTheClient { .. } => "NotTheClient",
            BrokerError::DeadlineNotPassed { .. } => "DeadlineNotPassed",
            BrokerError::ClockBackwards { .. } => "ClockBackwards",
            BrokerError::SupplyOverflow => "SupplyOverflow",
        }
    }
}

/// Terms of a new job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobTerms {
    pub spec_url: String,
    /// SHA-256 of the content at `spec_url`.
    pub spec_hash: [u8; 32],
    /// Serialized verification key.
    pub verification_key: Vec<u8>,
    pub fee: u64,
    pub collateral: u64,
    /// Ticks the worker has after registering.
    pub max_duration: Tick,
}

#[derive(Clone, Debug)]
pub struct Job<G: BilinearGroup = MockGroup> {
    pub id: JobId,
    pub client: String,
    pub spec_url: String,
    pub spec_hash: [u8; 32],
    pub fee: u64,
    pub collateral: u64,
    pub max_duration: Tick,
    pub state: JobState,
    pub worker: Option<String>,
    pub registered_at: Option<Tick>,
    pub proof_url: Option<String>,
    /// SHA-256 of the public values of an accepted result.
    pub result_hash: Option<[u8; 32]>,
    /// Every state the job has been in, with the tick it was entered.
    pub history: Vec<(Tick, JobState)>,
    verification_key: VerificationKey<G>,
}

impl<G: BilinearGroup> Job<G> {
    /// Last tick at which a proof still pays: `registered_at + max_duration`.
    pub fn deadline(&self) -> Option<Tick> {
        self.registered_at
            .map(|t| t.saturating_add(self.max_duration))
    }

    pub fn verification_key(&self) -> &VerificationKey<G> {
        &self.verification_key
    }

    fn enter(&mut self, tick: Tick, state: JobState) {
        self.state = state;
        self.history.push((tick, state));
    }
}

/// Where tokens sit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Holder {
    Account(String),
    Escrow(JobId),
}

impl fmt::Display for Holder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Holder::Account(a) => f.write_str(a),
            Holder::Escrow(j) => write!(f, "escrow#{j}"),
        }
    }
}

/// Outcome of a settled job.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Settlement {
    Paid,
    Slashed,
}

/// One log record: `tick | op | job_id | actor | outcome | deltas`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub tick: Tick,
    pub op: &'static str,
    pub job: Option<JobId>,
    pub actor: String,
    /// The job state after the call, or `ERR <kind>`.
    pub outcome: String,
    /// Signed balance changes in the order they happened.
    pub deltas: Vec<(Holder, i128)>,
}

impl Transition {
    /// `holder:+n holder:-n ...`, or `-` when no tokens moved.
    pub fn deltas_text(&self) -> String {
        if self.deltas.is_empty() {
            return "-".to_string();
        }
        let parts: Vec<String> = self
            .deltas
            .iter()
            .map(|(h, d)| format!("{h}:{d:+}"))
            .collect();
        parts.join(" ")
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let job = self.job.map_or_else(|| "-".to_string(), |j| j.to_string());
        write!(
            f,
            "{} | {} | {} | {} | {} | {}",
            self.tick,
            self.op,
            job,
            self.actor,
            self.outcome,
            self.deltas_text()
        )
    }
}

/// The broker: ledger, jobs, clock and transition log.
#[derive(Clone, Debug)]
pub struct Broker<G: BilinearGroup = MockGroup> {
    group: G,
    tick: Tick,
    balances: BTreeMap<String, u64>,
    escrow: BTreeMap<JobId, u64>,
    jobs: BTreeMap<JobId, Job<G>>,
    next_job: JobId,
    supply: u64,
    log: Vec<Transition>,
}

impl Default for Broker<MockGroup> {
    fn default() -> Self {
        Broker::new(MockGroup::default())
    }
}

impl<G: BilinearGroup> Broker<G> {
    /// An empty ledger at tick 0. `group` decodes keys and proofs.
    pub fn new(group: G) -> Self {
        Broker {
            group,
            tick: 0,
            balances: BTreeMap::new(),
            escrow: BTreeMap::new(),
            jobs: BTreeMap::new(),
            next_job: 1,
            supply: 0,
            log: Vec::new(),
        }
    }

    pub fn tick(&self) -> Tick {
        self.tick
    }

    /// Moves the clock forward to `tick`.
    pub fn advance_to(&mut self, tick: Tick) -> Result<(), BrokerError> {
        if tick < self.tick {
            return Err(BrokerError::ClockBackwards {
                now: self.tick,
                requested: tick,
            });
        }
        self.tick = tick;
        Ok(())
    }

    pub fn balance(&self, account: &str) -> u64 {
        self.balances.get(account).copied().unwrap_or(0)
    }

    pub fn balances(&self) -> &BTreeMap<String, u64> {
        &self.balances
    }

    pub fn escrow(&self, job: JobId) -> u64 {
        self.escrow.get(&job).copied().unwrap_or(0)
    }

    pub fn total_escrow(&self) -> u64 {
        self.escrow.values().sum()
    }

    /// Tokens ever minted. Always equals balances plus escrow.
    pub fn supply(&self) -> u64 {
        self.supply
    }

    pub fn job(&self, id: JobId) -> Option<&Job<G>> {
        self.jobs.get(&id)
    }

    pub fn jobs(&self) -> impl Iterator<Item = &Job<G>> {
        self.jobs.values()
    }

    pub fn log(&self) -> &[Transition] {
        &self.log
    }

    /// The log, one record per line.
    pub fn log_text(&self) -> String {
        self.log.iter().map(|t| format!("{t}\n")).collect()
    }

    /// Creates tokens out of nothing. Models the initial distribution.
    pub fn mint(&mut self, account: &str, amount: u64) -> Result<(), BrokerError> {
        self.run("mint", None, account, |b, deltas| {
            b.supply = b
                .supply
                .checked_add(amount)
                .ok_or(BrokerError::SupplyOverflow)?;
            *b.balances.entry(account.to_string()).or_insert(0) += amount;
            deltas.push((Holder::Account(account.to_string()), amount as i128));
            Ok("OK".to_string())
        })
    }

    /// Escrows `terms.fee` from `client` and opens a job.
    pub fn create_job(&mut self, client: &str, terms: JobTerms) -> Result<JobId, BrokerError> {
        let id = self.next_job;
        self.run("create_job", Some(id), client, |b, deltas| {
            if terms.fee == 0 || terms.collateral == 0 || terms.max_duration == 0 {
                return Err(BrokerError::InvalidParameters(
                    "fee, collateral and duration must be positive".into(),
                ));
            }
            let verification_key = VerificationKey::from_bytes(&b.group, &terms.verification_key)
                .map_err(|e| BrokerError::InvalidKey(e.to_string()))?;
            b.transfer(
                deltas,
                Holder::Account(client.into()),
                Holder::Escrow(id),
                terms.fee,
            )?;
            let mut job = Job {
                id,
                client: client.to_string(),
                spec_url: terms.spec_url,
                spec_hash: terms.spec_hash,
                fee: terms.fee,
                collateral: terms.collateral,
                max_duration: terms.max_duration,
                state: JobState::Open,
                worker: None,
                registered_at: None,
                proof_url: None,
                result_hash: None,
                history: Vec::new(),
                verification_key,
            };
            job.enter(b.tick, JobState::Open);
            b.jobs.insert(id, job);
            b.next_job += 1;
            Ok(JobState::Open.to_string())
        })?;
        Ok(id)
    }

    /// Escrows the collateral of `worker`, who becomes the job's only
    /// worker. The deadline is `now + max_duration`.
    pub fn register_worker(&mut self, worker: &str, job: JobId) -> Result<(), BrokerError> {
        self.run("register", Some(job), worker, |b, deltas| {
            let j = b.jobs.get(&job).ok_or(BrokerError::UnknownJob(job))?;
            if j.state != JobState::Open {
                return Err(BrokerError::JobNotOpen {
                    job,
                    state: j.state,
                });
            }
            let collateral = j.collateral;
            b.transfer(
                deltas,
                Holder::Account(worker.into()),
                Holder::Escrow(job),
                collateral,
            )?;
            let tick = b.tick;
            let j = b.jobs.get_mut(&job).unwrap();
            j.worker = Some(worker.to_string());
            j.registered_at = Some(tick);
            j.enter(tick, JobState::Registered);
            Ok(JobState::Registered.to_string())
        })
    }

    /// Settles a job from the worker's submission. `proof` and `io` are what
    /// the miner fetched: the serialized proof and the public inputs followed
    /// by the claimed outputs. The worker is paid iff the clock is at or
    /// before the deadline and the proof verifies; anything else, including
    /// undecodable or missing data, slashes.
    pub fn get_paid(
        &mut self,
        worker: &str,
        job: JobId,
        proof_url: &str,
        proof: &[u8],
        io: &[u64],
    ) -> Result<Settlement, BrokerError> {
        let mut settlement = Settlement::Slashed;
        self.run("get_paid", Some(job), worker, |b, deltas| {
            let j = b.jobs.get(&job).ok_or(BrokerError::UnknownJob(job))?;
            if j.state != JobState::Registered {
                return Err(BrokerError::JobNotRegistered {
                    job,
                    state: j.state,
                });
            }
            if j.worker.as_deref() != Some(worker) {
                return Err(BrokerError::NotTheWorker {
                    job,
                    caller: worker.to_string(),
                });
            }
            let on_time = b.tick <= j.deadline().expect("registered jobs have a deadline");
            let valid = on_time && check_proof(j.verification_key(), io, proof);
            let (to, state) = if valid {
                (worker.to_string(), JobState::Paid)
            } else {
                (j.client.clone(), JobState::Slashed)
            };
            let total = j.fee + j.collateral;
            b.transfer(deltas, Holder::Escrow(job), Holder::Account(to), total)?;
            let tick = b.tick;
            let j = b.jobs.get_mut(&job).unwrap();
            j.proof_url = Some(proof_url.to_string());
            j.enter(tick, JobState::ProofSubmitted);
            if valid {
                j.result_hash = Some(result_hash(io));
                settlement = Settlement::Paid;
            }
            j.enter(tick, state);
            Ok(state.to_string())
        })?;
        Ok(settlement)
    }

    /// Slashes a registered job whose deadline has passed. Anyone may call.
    pub fn claim_timeout(&mut self, caller: &str, job: JobId) -> Result<(), BrokerError> {
        self.run("claim_timeout", Some(job), caller, |b, deltas| {
            let j = b.jobs.get(&job).ok_or(BrokerError::UnknownJob(job))?;
            if j.state != JobState::Registered {
                return Err(BrokerError::JobNotRegistered {
                    job,
                    state: j.state,
                });
            }
            let deadline = j.deadline().expect("registered jobs have a deadline");
            if b.tick <= deadline {
                return Err(BrokerError::DeadlineNotPassed {
                    job,
                    deadline,
                    tick: b.tick,
                });
            }
            let (client, total) = (j.client.clone(), j.fee + j.collateral);
            b.transfer(deltas, Holder::Escrow(job), Holder::Account(client), total)?;
            let tick = b.tick;
            b.jobs.get_mut(&job).unwrap().enter(tick, JobState::Slashed);
            Ok(JobState::Slashed.to_string())
        })
    }

    /// Refunds the fee of a job nobody has registered for.
    pub fn cancel_job(&mut self, client: &str, job: JobId) -> Result<(), BrokerError> {
        self.run("cancel", Some(job), client, |b, deltas| {
            let j = b.jobs.get(&job).ok_or(BrokerError::UnknownJob(job))?;
            if j.state != JobState::Open {
                return Err(BrokerError::JobNotOpen {
                    job,
                    state: j.state,
                });
            }
            if j.client != client {
                return Err(BrokerError::NotTheClient {
                    job,
                    caller: client.to_string(),
                });
            }
            let fee = j.fee;
            b.transfer(
                deltas,
                Holder::Escrow(job),
                Holder::Account(client.into()),
                fee,
            )?;
            let tick = b.tick;
            b.jobs
                .get_mut(&job)
                .unwrap()
                .enter(tick, JobState::Cancelled);
            Ok(JobState::Cancelled.to_string())
        })
    }

    /// Runs `body` and logs the call. `body` must check every precondition
    /// before its first mutation.
    fn run(
        &mut self,
        op: &'static str,
        job: Option<JobId>,
        actor: &str,
        body: impl FnOnce(&mut Self, &mut Vec<(Holder, i128)>) -> Result<String, BrokerError>,
    ) -> Result<(), BrokerError> {
        let mut deltas = Vec::new();
        let result = body(self, &mut deltas);
        let outcome = match &result {
            Ok(o) => o.clone(),
            Err(e) => format!("ERR {}", e.kind()),
        };
        self.log.push(Transition {
            tick: self.tick,
            op,
            job,
            actor: actor.to_string(),
            outcome,
            deltas,
        });
        result.map(|_| ())
    }

    fn transfer(
        &mut self,
        deltas: &mut Vec<(Holder, i128)>,
        from: Holder,
        to: Holder,
        amount: u64,
    ) -> Result<(), BrokerError> {
        let available = match &from {
            Holder::Account(a) => self.balance(a),
            Holder::Escrow(j) => self.escrow(*j),
        };
        if available < amount {
            return Err(BrokerError::InsufficientBalance {
                account: from.to_string(),
                needed: amount,
                available,
            });
        }
        match &from {
            Holder::Account(a) => *self.balances.get_mut(a).unwrap() -= amount,
            Holder::Escrow(j) => {
                let left = available - amount;
                if left == 0 {
                    self.escrow.remove(j);
                } else {
                    self.escrow.insert(*j, left);
                }
            }
        }
        match &to {
            Holder::Account(a) => *self.balances.entry(a.clone()).or_insert(0) += amount,
            Holder::Escrow(j) => *self.escrow.entry(*j).or_insert(0) += amount,
        }
        deltas.push((from, -(amount as i128)));
        deltas.push((to, amount as i128));
        Ok(())
    }
}

fn check_proof<G: BilinearGroup>(vk: &VerificationKey<G>, io: &[u64], proof: &[u8]) -> bool {
    let field = vk.group().scalar_field();
    if io.iter().any(|&v| v >= field.modulus()) {
        return false;
    }
    let io: Vec<_> = io.iter().map(|&v| field.element(v)).collect();
    verify_bytes(vk, &io, proof).unwrap_or(false)
}

/// SHA-256 over the big-endian encoding of `io`.
pub fn result_hash(io: &[u64]) -> [u8; 32] {
    let mut h = Sha256::new();
    for v in io {
        h.update(v.to_be_bytes());
    }
    h.finalize().into()
}
