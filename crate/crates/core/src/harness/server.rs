use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServerError {
    #[error("nothing published at {0}")]
    NotFound(String),
    #[error("{0} is already published")]
    PathAlreadyPublished(String),
    #[error("content at {0} does not match its hash")]
    HashMismatch(String),
}

impl ServerError {
    pub fn kind(&self) -> &'static str {
        match self {
            ServerError::NotFound(_) => "NotFound",
            ServerError::PathAlreadyPublished(_) => "PathAlreadyPublished",
            ServerError::HashMismatch(_) => "HashMismatch",
        }
    }
}

pub fn sha256(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

/// A write-once key-value store of published files, each kept with the
/// SHA-256 of the bytes it was published with.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContentServer {
    store: BTreeMap<String, (Vec<u8>, [u8; 32])>,
}

impl ContentServer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn publish(&mut self, path: &str, bytes: Vec<u8>) -> Result<[u8; 32], ServerError> {
        if self.store.contains_key(path) {
            return Err(ServerError::PathAlreadyPublished(path.to_string()));
        }
        let hash = sha256(&bytes);
        self.store.insert(path.to_string(), (bytes, hash));
        Ok(hash)
    }

    /// Returns the bytes at `path` after checking them against the hash
    /// recorded at publication.
    pub fn fetch(&self, path: &str) -> Result<Vec<u8>, ServerError> {
        let (bytes, hash) = self
            .store
            .get(path)
            .ok_or_else(|| ServerError::NotFound(path.to_string()))?;
        if sha256(bytes) != *hash {
            return Err(ServerError::HashMismatch(path.to_string()));
        }
        Ok(bytes.clone())
    }

    pub fn contains(&self, path: &str) -> bool {
        self.store.contains_key(path)
    }

    /// Flips one bit of the stored bytes, leaving the recorded hash alone.
    /// Returns false if nothing is stored at `path`.
    pub fn corrupt(&mut self, path: &str) -> bool {
        match self.store.get_mut(path) {
            Some((bytes, _)) => {
                match bytes.first_mut() {
                    Some(b) => *b ^= 1,
                    None => bytes.push(0),
                }
                true
            }
            None => false,
        }
    }

    /// `(path, sha256 of the current bytes)` for every entry.
    pub fn digests(&self) -> impl Iterator<Item = (&str, [u8; 32])> {
        self.store.iter().map(|(p, (b, _))| (p.as_str(), sha256(b)))
    }
}

/// Every actor's server, addressed by URLs of the form `actor/path`.
#[derive(Clone, Debug, Default)]
pub struct Network {
    servers: BTreeMap<String, ContentServer>,
}

impl Network {
    pub fn url(owner: &str, path: &str) -> String {
        format!("{owner}/{path}")
    }

    fn split(url: &str) -> Result<(&str, &str), ServerError> {
        url.split_once('/')
            .ok_or_else(|| ServerError::NotFound(url.to_string()))
    }

    pub fn server(&self, owner: &str) -> Option<&ContentServer> {
        self.servers.get(owner)
    }

    pub fn publish(&mut self, url: &str, bytes: Vec<u8>) -> Result<[u8; 32], ServerError> {
        let (owner, path) = Self::split(url)?;
        self.servers
            .entry(owner.to_string())
            .or_default()
            .publish(path, bytes)
    }

    pub fn fetch(&self, url: &str) -> Result<Vec<u8>, ServerError> {
        let (owner, path) = Self::split(url)?;
        self.servers
            .get(owner)
            .ok_or_else(|| ServerError::NotFound(url.to_string()))?
            .fetch(path)
    }

    pub fn corrupt(&mut self, url: &str) -> bool {
        match Self::split(url) {
            Ok((owner, path)) => self.servers.get_mut(owner).is_some_and(|s| s.corrupt(path)),
            Err(_) => false,
        }
    }

    /// `(url, digest)` for every file on every server, sorted by URL.
    pub fn digests(&self) -> Vec<(String, [u8; 32])> {
        self.servers
            .iter()
            .flat_map(|(owner, s)| s.digests().map(move |(p, h)| (Self::url(owner, p), h)))
            .collect()
    }
}
