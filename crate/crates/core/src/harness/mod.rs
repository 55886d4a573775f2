//! A discrete-event simulation of the whole exchange.
//!
//! A client posts a job (publishing its inputs and proving key on its own
//! server and escrowing a fee on the broker), a worker registers, computes,
//! publishes a result and proof on its server and asks to be paid, and a
//! miner applies every transaction to the [`Broker`] at the end of the tick
//! in which it was sent. Before settling a payment claim the miner fetches
//! the proof, the claimed outputs and the job inputs, checking the inputs
//! against the hash recorded on chain. On payment it copies the result to
//! the client's server.
//!
//! Runs are deterministic in `(script, seed)`: the seed drives app inputs
//! and trapdoors, and nothing else is random.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apps::{AppInput, AppSpec};
use crate::broker::{Broker, JobId, JobState, JobTerms, Tick, Transition};
use crate::circuit::to_r1cs;
use crate::field::PrimeField;
use crate::proof::{prove, prove_unchecked, setup, EvaluationKey, MockGroup};
use crate::qap::r1cs_to_qap;

mod script;
mod server;

pub use script::{Action, ComputeMode, Directive, ScenarioScript};
pub use server::{sha256, ContentServer, Network, ServerError};

/// An honest worker on a 4x4 matrix product; ends PAID.
pub const HAPPY_PATH: &str = include_str!("../../scenarios/happy_path.txt");
/// A worker that alters its result; ends SLASHED.
pub const TAMPERED_RESULT: &str = include_str!("../../scenarios/tampered_result.txt");
/// A worker that never submits and is timed out; ends SLASHED.
pub const STALL_TIMEOUT: &str = include_str!("../../scenarios/stall_timeout.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("line {line}: {reason}")]
    MalformedScript { line: usize, reason: String },
}

/// One trace line: `tick | op | job | actor | outcome | detail`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub tick: Tick,
    pub op: String,
    pub job: Option<JobId>,
    pub actor: String,
    pub outcome: String,
    pub detail: String,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let job = self.job.map_or_else(|| "-".to_string(), |j| j.to_string());
        write!(
            f,
            "{} | {} | {} | {} | {} | {}",
            self.tick, self.op, job, self.actor, self.outcome, self.detail
        )
    }
}

impl From<&Transition> for TraceEvent {
    fn from(t: &Transition) -> Self {
        TraceEvent {
            tick: t.tick,
            op: t.op.to_string(),
            job: t.job,
            actor: t.actor.clone(),
            outcome: t.outcome.clone(),
            detail: t.deltas_text(),
        }
    }
}

/// Final state of one job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSummary {
    pub id: JobId,
    pub client: String,
    pub worker: Option<String>,
    pub state: JobState,
    /// Whether the client's server holds a result for this job.
    pub delivered: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioTrace {
    pub events: Vec<TraceEvent>,
    pub balances: BTreeMap<String, u64>,
    pub jobs: Vec<JobSummary>,
    /// `(url, sha256)` of every file on every server at the end.
    pub files: Vec<(String, [u8; 32])>,
}

impl ScenarioTrace {
    pub fn job(&self, id: JobId) -> Option<&JobSummary> {
        self.jobs.iter().find(|j| j.id == id)
    }

    /// Events, then final balances, job states and file digests.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&format!("{e}\n"));
        }
        for (account, amount) in &self.balances {
            out.push_str(&format!("# balance {account} {amount}\n"));
        }
        for j in &self.jobs {
            out.push_str(&format!("# job {} {}\n", j.id, j.state));
        }
        for (url, hash) in &self.files {
            out.push_str(&format!("# file {url} {}\n", hex::encode(hash)));
        }
        out
    }
}

/// A worker's result file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub job: JobId,
    pub outputs: Vec<u64>,
}

enum Tx {
    Mint {
        account: String,
        amount: u64,
    },
    CreateJob {
        client: String,
        terms: JobTerms,
    },
    Register {
        worker: String,
        job: JobId,
    },
    GetPaid {
        worker: String,
        job: JobId,
        proof_url: String,
        result_url: String,
    },
    ClaimTimeout {
        caller: String,
        job: JobId,
    },
    Cancel {
        client: String,
        job: JobId,
    },
}

struct Submission {
    worker: String,
    job: JobId,
    proof: Vec<u8>,
    result: ResultFile,
}

struct Sim {
    field: PrimeField,
    group: MockGroup,
    rng: ChaCha8Rng,
    broker: Broker,
    net: Network,
    events: Vec<TraceEvent>,
    mempool: Vec<Tx>,
    pending: BTreeMap<Tick, Vec<Submission>>,
    posts: BTreeMap<String, usize>,
    logged: usize,
    tick: Tick,
}

/// Runs `script` over the default field.
pub fn run_scenario(script: &ScenarioScript, seed: u64) -> Result<ScenarioTrace, HarnessError> {
    run_scenario_in(PrimeField::default(), script, seed)
}

pub fn run_scenario_in(
    field: PrimeField,
    script: &ScenarioScript,
    seed: u64,
) -> Result<ScenarioTrace, HarnessError> {
    for d in &script.directives {
        if let Action::PostJob { spec, .. } = &d.action {
            spec.validate(field)
                .map_err(|e| HarnessError::MalformedScript {
                    line: d.line,
                    reason: e.to_string(),
                })?;
        }
    }
    let group = MockGroup::new(field);
    let mut sim = Sim {
        field,
        broker: Broker::new(group.clone()),
        group,
        rng: ChaCha8Rng::seed_from_u64(seed),
        net: Network::default(),
        events: Vec::new(),
        mempool: Vec::new(),
        pending: BTreeMap::new(),
        posts: BTreeMap::new(),
        logged: 0,
        tick: 0,
    };
    let mut directives = script.directives.iter().peekable();
    loop {
        let next_directive = directives.peek().map(|d| d.tick);
        let next_submit = sim.pending.keys().next().copied();
        let Some(tick) = [next_directive, next_submit].into_iter().flatten().min() else {
            break;
        };
        sim.tick = tick;
        sim.broker
            .advance_to(tick)
            .expect("ticks only move forward");
        if let Some(subs) = sim.pending.remove(&tick) {
            for s in subs {
                sim.submit(s);
            }
        }
        while let Some(d) = directives.next_if(|d| d.tick == tick) {
            sim.direct(d);
        }
        sim.mine();
    }
    Ok(sim.finish())
}

impl Sim {
    fn event(&mut self, op: &str, job: Option<JobId>, actor: &str, outcome: &str, detail: String) {
        self.events.push(TraceEvent {
            tick: self.tick,
            op: op.to_string(),
            job,
            actor: actor.to_string(),
            outcome: outcome.to_string(),
            detail,
        });
    }

    fn publish(&mut self, job: Option<JobId>, actor: &str, url: &str, bytes: Vec<u8>) -> bool {
        match self.net.publish(url, bytes) {
            Ok(hash) => {
                self.event(
                    "publish",
                    job,
                    actor,
                    "OK",
                    format!("{url} {}", short(&hash)),
                );
                true
            }
            Err(e) => {
                self.event(
                    "publish",
                    job,
                    actor,
                    &format!("ERR {}", e.kind()),
                    url.to_string(),
                );
                false
            }
        }
    }

    fn fetch(&mut self, job: JobId, actor: &str, url: &str) -> Option<Vec<u8>> {
        match self.net.fetch(url) {
            Ok(bytes) => Some(bytes),
            Err(e) => {
                self.event(
                    "fetch",
                    Some(job),
                    actor,
                    &format!("ERR {}", e.kind()),
                    url.to_string(),
                );
                None
            }
        }
    }

    fn direct(&mut self, d: &Directive) {
        let actor = d.actor.as_str();
        match &d.action {
            Action::Mint { amount } => self.mempool.push(Tx::Mint {
                account: actor.to_string(),
                amount: *amount,
            }),
            Action::PostJob {
                spec,
                fee,
                collateral,
                duration,
            } => self.post_job(actor, *spec, *fee, *collateral, *duration),
            Action::Register { job } => self.mempool.push(Tx::Register {
                worker: actor.to_string(),
                job: *job,
            }),
            Action::Compute { job, mode, delay } => self.compute(actor, *job, *mode, *delay),
            Action::ClaimTimeout { job } => self.mempool.push(Tx::ClaimTimeout {
                caller: actor.to_string(),
                job: *job,
            }),
            Action::Cancel { job } => self.mempool.push(Tx::Cancel {
                client: actor.to_string(),
                job: *job,
            }),
            Action::Corrupt { url } => {
                let outcome = if self.net.corrupt(url) {
                    "OK"
                } else {
                    "ERR NotFound"
                };
                self.event("corrupt", None, actor, outcome, url.clone());
            }
        }
    }

    fn post_job(&mut self, client: &str, spec: AppSpec, fee: u64, collateral: u64, duration: Tick) {
        let n = self.posts.entry(client.to_string()).or_insert(0);
        *n += 1;
        let dir = format!("post-{n}");
        let inputs = spec.random_inputs(self.field, &mut self.rng);
        let setup_seed: u64 = self.rng.random();
        let spec_file = AppInput::new(spec, Some(self.field.modulus()), &inputs)
            .expect("random inputs fit the spec")
            .to_toml();
        let circuit = spec.build(self.field).expect("validated before the run");
        let qap = r1cs_to_qap(&to_r1cs(&circuit).expect("app circuits lower"))
            .expect("app circuits have constraints");
        let (ek, vk) = match setup(&self.group, &qap, setup_seed) {
            Ok(keys) => keys,
            Err(e) => {
                self.event("setup", None, client, "ERR", e.to_string());
                return;
            }
        };
        let spec_url = Network::url(client, &format!("{dir}/spec.toml"));
        let ek_url = Network::url(client, &format!("{dir}/ek.bin"));
        let spec_hash = sha256(spec_file.as_bytes());
        if !self.publish(None, client, &spec_url, spec_file.into_bytes())
            || !self.publish(None, client, &ek_url, ek.to_bytes())
        {
            return;
        }
        self.mempool.push(Tx::CreateJob {
            client: client.to_string(),
            terms: JobTerms {
                spec_url,
                spec_hash,
                verification_key: vk.to_bytes(),
                fee,
                collateral,
                max_duration: duration,
            },
        });
    }

    fn compute(&mut self, worker: &str, job: JobId, mode: ComputeMode, delay: Tick) {
        let Some(j) = self.broker.job(job) else {
            self.event("compute", Some(job), worker, "ERR UnknownJob", "-".into());
            return;
        };
        if j.state != JobState::Registered || j.worker.as_deref() != Some(worker) {
            let outcome = format!("ERR job is {}", j.state);
            self.event("compute", Some(job), worker, &outcome, "-".into());
            return;
        }
        let (spec_url, spec_hash) = (j.spec_url.clone(), j.spec_hash);
        let ek_url = spec_url.replace("spec.toml", "ek.bin");
        let Some(spec_bytes) = self.fetch(job, worker, &spec_url) else {
            return;
        };
        if sha256(&spec_bytes) != spec_hash {
            self.event(
                "compute",
                Some(job),
                worker,
                "ERR spec hash mismatch",
                spec_url,
            );
            return;
        }
        let Some(ek_bytes) = self.fetch(job, worker, &ek_url) else {
            return;
        };
        if mode == ComputeMode::Stall {
            self.event("compute", Some(job), worker, "stall", "-".into());
            return;
        }
        match self.run_job(&spec_bytes, &ek_bytes, mode) {
            Ok((proof, outputs)) => {
                let at = self.tick + delay;
                let label = if mode == ComputeMode::Honest {
                    "honest"
                } else {
                    "tamper"
                };
                self.event("compute", Some(job), worker, label, format!("submit@{at}"));
                self.pending.entry(at).or_default().push(Submission {
                    worker: worker.to_string(),
                    job,
                    proof,
                    result: ResultFile { job, outputs },
                });
            }
            Err(reason) => self.event("compute", Some(job), worker, "ERR", reason),
        }
    }

    /// Evaluates and proves; returns proof bytes and claimed outputs.
    fn run_job(
        &self,
        spec: &[u8],
        ek: &[u8],
        mode: ComputeMode,
    ) -> Result<(Vec<u8>, Vec<u64>), String> {
        let text = std::str::from_utf8(spec).map_err(|e| e.to_string())?;
        let input = AppInput::parse(text).map_err(|e| e.to_string())?;
        input.validate().map_err(|e| e.to_string())?;
        let field = input.field().map_err(|e| e.to_string())?;
        let circuit = input.spec().build(field).map_err(|e| e.to_string())?;
        let qap = r1cs_to_qap(&to_r1cs(&circuit).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let ek =
            EvaluationKey::from_bytes(&MockGroup::new(field), ek).map_err(|e| e.to_string())?;
        let mut witness = circuit
            .evaluate_u64(&input.inputs(), &[])
            .map_err(|e| e.to_string())?;
        let proof = if mode == ComputeMode::Tamper {
            let first = circuit
                .public_output_wires()
                .next()
                .expect("apps have outputs");
            witness.set(first, witness.get(first) + field.one());
            prove_unchecked(&ek, &qap, &witness)
        } else {
            prove(&ek, &qap, &witness)
        }
        .map_err(|e| e.to_string())?;
        let outputs = circuit
            .public_output_wires()
            .map(|w| witness.get(w).value())
            .collect();
        Ok((proof.to_bytes(), outputs))
    }

    fn submit(&mut self, s: Submission) {
        let proof_url = Network::url(&s.worker, &format!("job-{}/proof.bin", s.job));
        let result_url = Network::url(&s.worker, &format!("job-{}/result.toml", s.job));
        let result = toml::to_string(&s.result).expect("result files serialize");
        if !self.publish(Some(s.job), &s.worker, &proof_url, s.proof)
            || !self.publish(Some(s.job), &s.worker, &result_url, result.into_bytes())
        {
            return;
        }
        self.mempool.push(Tx::GetPaid {
            worker: s.worker,
            job: s.job,
            proof_url,
            result_url,
        });
    }

    /// Applies the mempool in order, copying each broker transition into the
    /// trace, then records a ledger snapshot if anything was logged.
    fn mine(&mut self) {
        let before = self.logged;
        for tx in std::mem::take(&mut self.mempool) {
            match tx {
                Tx::Mint { account, amount } => {
                    let _ = self.broker.mint(&account, amount);
                }
                Tx::CreateJob { client, terms } => {
                    let _ = self.broker.create_job(&client, terms);
                }
                Tx::Register { worker, job } => {
                    let _ = self.broker.register_worker(&worker, job);
                }
                Tx::GetPaid {
                    worker,
                    job,
                    proof_url,
                    result_url,
                } => self.settle(&worker, job, &proof_url, &result_url),
                Tx::ClaimTimeout { caller, job } => {
                    let _ = self.broker.claim_timeout(&caller, job);
                }
                Tx::Cancel { client, job } => {
                    let _ = self.broker.cancel_job(&client, job);
                }
            }
            self.flush_log();
        }
        if self.logged > before {
            let balances: Vec<String> = self
                .broker
                .balances()
                .iter()
                .map(|(a, v)| format!("{a}={v}"))
                .collect();
            let escrow = format!("escrow={}", self.broker.total_escrow());
            self.event("snapshot", None, "miner", &escrow, balances.join(" "));
        }
    }

    /// Copies broker transitions not yet in the trace.
    fn flush_log(&mut self) {
        let log = self.broker.log();
        self.events
            .extend(log[self.logged..].iter().map(TraceEvent::from));
        self.logged = log.len();
    }

    fn settle(&mut self, worker: &str, job: JobId, proof_url: &str, result_url: &str) {
        let proof = self.fetch(job, "miner", proof_url).unwrap_or_default();
        let outputs = self
            .fetch(job, "miner", result_url)
            .and_then(|b| String::from_utf8(b).ok())
            .and_then(|t| toml::from_str::<ResultFile>(&t).ok())
            .filter(|r| r.job == job)
            .map(|r| r.outputs);
        let inputs = match self.broker.job(job) {
            Some(j) => {
                let (url, hash) = (j.spec_url.clone(), j.spec_hash);
                self.fetch(job, "miner", &url)
                    .filter(|b| sha256(b) == hash)
                    .and_then(|b| String::from_utf8(b).ok())
                    .and_then(|t| AppInput::parse(&t).ok())
                    .map(|i| i.inputs())
            }
            None => None,
        };
        let io = match (inputs, outputs) {
            (Some(mut i), Some(o)) => {
                i.extend(o);
                i
            }
            _ => Vec::new(),
        };
        let paid = self.broker.get_paid(worker, job, proof_url, &proof, &io);
        self.flush_log();
        if paid == Ok(crate::broker::Settlement::Paid) {
            let client = self
                .broker
                .job(job)
                .expect("settled job exists")
                .client
                .clone();
            let bytes = self.net.fetch(result_url).expect("fetched moments ago");
            let url = Network::url(&client, &format!("job-{job}/result.toml"));
            self.publish(Some(job), "miner", &url, bytes);
        }
    }

    fn finish(self) -> ScenarioTrace {
        let jobs = self
            .broker
            .jobs()
            .map(|j| JobSummary {
                id: j.id,
                client: j.client.clone(),
                worker: j.worker.clone(),
                state: j.state,
                delivered: self
                    .net
                    .server(&j.client)
                    .is_some_and(|s| s.contains(&format!("job-{}/result.toml", j.id))),
            })
            .collect();
        ScenarioTrace {
            events: self.events,
            balances: self.broker.balances().clone(),
            jobs,
            files: self.net.digests(),
        }
    }
}

fn short(hash: &[u8; 32]) -> String {
    hex::encode(&hash[..8])
}

/// Parses and runs a script.
pub fn run_script_text(text: &str, seed: u64) -> Result<ScenarioTrace, HarnessError> {
    run_scenario(&ScenarioScript::parse(text)?, seed)
}
