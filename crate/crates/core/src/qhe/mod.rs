//! Idealised quantum homomorphic encryption.
//!
//! The scheme is an ideal functionality: ciphertexts carry a key identifier,
//! a random nonce and a masked copy of the plaintext, and the evaluator looks
//! the key up in a shared table. It is not computationally secure and keeps
//! no secrets from code holding the scheme; [`IdealQhe::peek`] exposes this
//! directly for adversary models that may read plaintexts.

mod audit;
mod circuit;

pub use audit::{correctness_audit, AuditReport, CqState};
pub use circuit::{AliceCircuit, EmbeddedCircuit, HomomorphicCircuit};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::RwLock;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::quantum::{sample_index, StateVector};

const KEY_BYTES: usize = 32;
const MIN_NONCE_BYTES: usize = 16;

/// Secret key handle. Debug output omits the key material.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey {
    id: u64,
    material: [u8; KEY_BYTES],
}

impl SecretKey {
    pub fn id(&self) -> u64 {
        self.id
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecretKey").field("id", &self.id).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ciphertext {
    pub key_id: u64,
    #[serde(with = "hex_bytes")]
    pub nonce: Vec<u8>,
    #[serde(with = "hex_bytes")]
    pub payload: Vec<u8>,
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

/// One possible outcome of a homomorphic evaluation.
#[derive(Clone, Debug)]
pub struct EvalBranch {
    pub ciphertext: Ciphertext,
    pub probability: f64,
    /// Sub-normalised post-evaluation register.
    pub state: StateVector,
    /// Index of the circuit's Kraus operator that produced this branch.
    pub kraus_index: usize,
}

/// Ideal QHE with an append-only key table.
#[derive(Debug)]
pub struct IdealQhe {
    lambda: usize,
    keys: RwLock<Vec<[u8; KEY_BYTES]>>,
}

impl IdealQhe {
    /// `lambda` only sizes the nonce.
    pub fn new(lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::InvalidArgument("security parameter must be positive".into()));
        }
        Ok(Self { lambda, keys: RwLock::new(Vec::new()) })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn nonce_bytes(&self) -> usize {
        MIN_NONCE_BYTES.max(self.lambda.div_ceil(8))
    }

    pub fn gen<R: Rng + ?Sized>(&self, rng: &mut R) -> SecretKey {
        let mut material = [0u8; KEY_BYTES];
        rng.fill_bytes(&mut material);
        let mut keys = self.keys.write().expect("key table lock poisoned");
        keys.push(material);
        SecretKey { id: (keys.len() - 1) as u64, material }
    }

    pub fn enc<R: Rng + ?Sized>(&self, sk: &SecretKey, m: &Bits, rng: &mut R) -> Result<Ciphertext> {
        self.lookup(sk.id)?;
        let mut nonce = vec![0u8; self.nonce_bytes()];
        rng.fill_bytes(&mut nonce);
        let payload = mask(&sk.material, &nonce, &m.to_bytes());
        Ok(Ciphertext { key_id: sk.id, nonce, payload })
    }

    pub fn dec(&self, sk: &SecretKey, c: &Ciphertext) -> Result<Bits> {
        if c.key_id != sk.id {
            return Err(Error::MalformedCiphertext(format!(
                "ciphertext under key {} decrypted with key {}",
                c.key_id, sk.id
            )));
        }
        self.open(&sk.material, c)
    }

    /// Decrypts through the key table; available to transparent adversaries.
    pub fn peek(&self, c: &Ciphertext) -> Result<Bits> {
        let material = self.lookup(c.key_id)?;
        self.open(&material, c)
    }

    /// Decrypts `c` internally, applies the circuit's instrument for the
    /// plaintext to `register`, samples the classical output and re-encrypts
    /// it. Returns the output ciphertext and the normalised register.
    pub fn eval<R: Rng + ?Sized>(
        &self,
        circuit: &dyn HomomorphicCircuit,
        register: &StateVector,
        c: &Ciphertext,
        rng: &mut R,
    ) -> Result<(Ciphertext, StateVector)> {
        let (ct, state, _) = self.eval_indexed(circuit, register, c, rng)?;
        Ok((ct, state))
    }

    /// As [`Self::eval`], also reporting which Kraus branch occurred.
    pub fn eval_indexed<R: Rng + ?Sized>(
        &self,
        circuit: &dyn HomomorphicCircuit,
        register: &StateVector,
        c: &Ciphertext,
        rng: &mut R,
    ) -> Result<(Ciphertext, StateVector, usize)> {
        let plaintext = self.peek(c)?;
        let family = circuit.instrument(&plaintext)?;
        let branches = family.branches(register)?;
        let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
        let k = sample_index(&probs, rng)?;
        let out = self.reencrypt(c.key_id, &branches[k].label, rng)?;
        Ok((out, branches[k].state.normalized()?, k))
    }

    /// Every branch of an evaluation, each with a freshly encrypted output.
    pub fn eval_branches<R: Rng + ?Sized>(
        &self,
        circuit: &dyn HomomorphicCircuit,
        register: &StateVector,
        c: &Ciphertext,
        rng: &mut R,
    ) -> Result<Vec<EvalBranch>> {
        let plaintext = self.peek(c)?;
        let family = circuit.instrument(&plaintext)?;
        family
            .branches(register)?
            .into_iter()
            .map(|b| {
                Ok(EvalBranch {
                    ciphertext: self.reencrypt(c.key_id, &b.label, rng)?,
                    probability: b.probability,
                    state: b.state,
                    kraus_index: b.index,
                })
            })
            .collect()
    }

    /// Encrypts under the key with the given id.
    pub(crate) fn reencrypt<R: Rng + ?Sized>(&self, key_id: u64, m: &Bits, rng: &mut R) -> Result<Ciphertext> {
        let material = self.lookup(key_id)?;
        let mut nonce = vec![0u8; self.nonce_bytes()];
        rng.fill_bytes(&mut nonce);
        let payload = mask(&material, &nonce, &m.to_bytes());
        Ok(Ciphertext { key_id, nonce, payload })
    }

    fn lookup(&self, id: u64) -> Result<[u8; KEY_BYTES]> {
        let keys = self.keys.read().expect("key table lock poisoned");
        keys.get(id as usize).copied().ok_or(Error::UnknownKey(id))
    }

    fn open(&self, material: &[u8; KEY_BYTES], c: &Ciphertext) -> Result<Bits> {
        if c.nonce.len() != self.nonce_bytes() {
            return Err(Error::MalformedCiphertext(format!("nonce of {} bytes", c.nonce.len())));
        }
        Bits::from_bytes(&mask(material, &c.nonce, &c.payload))
    }
}

/// XOR with a keystream derived from the key and nonce.
fn mask(key: &[u8; KEY_BYTES], nonce: &[u8], data: &[u8]) -> Vec<u8> {
    let mut seed = *key;
    for (i, b) in nonce.iter().enumerate() {
        seed[i % KEY_BYTES] ^= b.rotate_left((i / KEY_BYTES) as u32);
    }
    let mut stream = ChaCha20Rng::from_seed(seed);
    let mut ks = vec![0u8; data.len()];
    stream.fill_bytes(&mut ks);
    data.iter().zip(ks).map(|(d, k)| d ^ k).collect()
}
