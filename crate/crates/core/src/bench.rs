//! Timing of key generation, proving and verification per app.
//!
//! Key generation covers building the circuit, lowering it to a QAP and the
//! trusted setup. Proof generation covers evaluating the witness and
//! proving. Verification is repeated until it has run for at least
//! [`MIN_VERIFY_TIME`] and averaged, since a single call is far below timer
//! resolution.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::apps::{AppError, AppSpec};
use crate::circuit::{to_r1cs, CircuitError};
use crate::field::PrimeField;
use crate::proof::{prove, setup, verify, MockGroup, ProofError};
use crate::qap::{r1cs_to_qap, QapError};

pub const MIN_VERIFY_TIME: Duration = Duration::from_millis(20);

pub const CSV_HEADER: &str = "app,size,rep,keygen_s,proofgen_s,verify_ms,proof_bytes";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error(transparent)]
    App(#[from] AppError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Qap(#[from] QapError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error("{app} {size} rep {rep}: honest proof rejected")]
    Rejected {
        app: String,
        size: String,
        rep: usize,
    },
}

/// One measured repetition.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub app: &'static str,
    pub size: String,
    pub rep: usize,
    pub keygen_s: f64,
    pub proofgen_s: f64,
    pub verify_ms: f64,
    pub proof_bytes: usize,
    /// Number of constraints, which sets the prover's cost.
    pub constraints: usize,
}

/// Mean and, with two or more samples, sample standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: Option<f64>,
}

impl Stat {
    pub fn of(samples: &[f64]) -> Stat {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std = (samples.len() >= 2).then(|| {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            var.sqrt()
        });
        Stat { mean, std }
    }

    fn show(&self, digits: usize) -> String {
        match self.std {
            Some(s) => format!("{:.*} ± {:.*}", digits, self.mean, digits, s),
            None => format!("{:.*}", digits, self.mean),
        }
    }
}

/// Per-app summary across repetitions.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchSummary {
    pub app: &'static str,
    pub size: String,
    pub reps: usize,
    pub constraints: usize,
    pub keygen_s: Stat,
    pub proofgen_s: Stat,
    pub verify_ms: Stat,
    pub proof_bytes: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6},{}",
                r.app, r.size, r.rep, r.keygen_s, r.proofgen_s, r.verify_ms, r.proof_bytes
            );
        }
        out
    }

    /// Rows grouped by `(app, size)` in first-seen order.
    pub fn summaries(&self) -> Vec<BenchSummary> {
        let mut keys: Vec<(&'static str, &str)> = Vec::new();
        for r in &self.rows {
            if !keys.contains(&(r.app, r.size.as_str())) {
                keys.push((r.app, &r.size));
            }
        }
        keys.into_iter()
            .map(|(app, size)| {
                let rows: Vec<&BenchRow> = self
                    .rows
                    .iter()
                    .filter(|r| r.app == app && r.size == size)
                    .collect();
                let col = |f: fn(&BenchRow) -> f64| {
                    Stat::of(&rows.iter().map(|r| f(r)).collect::<Vec<_>>())
                };
                BenchSummary {
                    app,
                    size: size.to_string(),
                    reps: rows.len(),
                    constraints: rows[0].constraints,
                    keygen_s: col(|r| r.keygen_s),
                    proofgen_s: col(|r| r.proofgen_s),
                    verify_ms: col(|r| r.verify_ms),
                    proof_bytes: rows[0].proof_bytes,
                }
            })
            .collect()
    }

    /// An aligned text table of the summaries.
    pub fn to_table(&self) -> String {
        let header = [
            "app",
            "size",
            "reps",
            "constraints",
            "KeyGen (s)",
            "ProofGen (s)",
            "Verify (ms)",
            "proof bytes",
        ];
        let body: Vec<[String; 8]> = self
            .summaries()
            .into_iter()
            .map(|s| {
                [
                    s.app.to_string(),
                    s.size,
                    s.reps.to_string(),
                    s.constraints.to_string(),
                    s.keygen_s.show(4),
                    s.proofgen_s.show(4),
                    s.verify_ms.show(4),
                    s.proof_bytes.to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |cells: &[String], out: &mut String| {
            let padded: Vec<String> = cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&header.map(String::from), &mut out);
        line(&widths.map(|w| "-".repeat(w)), &mut out);
        for row in &body {
            line(row, &mut out);
        }
        out
    }
}

/// Runs setup, prove and verify `reps` times for every spec. Repetition `r`
/// of every spec uses inputs and trapdoor drawn from `seed` and `r` only.
pub fn bench(
    specs: &[AppSpec],
    reps: usize,
    seed: u64,
    field: PrimeField,
) -> Result<BenchReport, BenchError> {
    if reps == 0 {
        return Err(BenchError::NoRepetitions);
    }
    let group = MockGroup::new(field);
    let mut report = BenchReport::default();
    for spec in specs {
        spec.validate(field)?;
        for rep in 0..reps {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (rep as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let inputs = spec.random_inputs(field, &mut rng);

            let start = Instant::now();
            let circuit = spec.build(field)?;
            let qap = r1cs_to_qap(&to_r1cs(&circuit)?)?;
            let (ek, vk) = setup(&group, &qap, rng.random())?;
            let keygen = start.elapsed();

            let start = Instant::now();
            let witness = circuit.evaluate_u64(&inputs, &[])?;
            let proof = prove(&ek, &qap, &witness)?;
            let proofgen = start.elapsed();

            let io = witness.public_io(qap.public_io_range());
            let mut runs = 0u32;
            let start = Instant::now();
            loop {
                let ok = verify(&vk, &io, &proof)?;
                if !ok {
                    return Err(BenchError::Rejected {
                        app: spec.name().into(),
                        size: spec.size_label(),
                        rep,
                    });
                }
                runs += 1;
                if start.elapsed() >= MIN_VERIFY_TIME {
                    break;
                }
            }
            let verify_time = start.elapsed() / runs;

            report.rows.push(BenchRow {
                app: spec.name(),
                size: spec.size_label(),
                rep,
                keygen_s: keygen.as_secs_f64(),
                proofgen_s: proofgen.as_secs_f64(),
                verify_ms: verify_time.as_secs_f64() * 1e3,
                proof_bytes: proof.to_bytes().len(),
                constraints: qap.degree(),
            });
        }
    }
    Ok(report)
}
