//! The human agent's switchable beliefs.

use serde::{Deserialize, Serialize};

use crate::agentlang::Term;

pub const ROUNDS: u8 = 4;
pub const SWITCH_COUNT: usize = 15;
pub const DOMAIN_SIZE: u32 = 1 << SWITCH_COUNT;

const BORED: u32 = 12;
const SKIP: u32 = 13;
const NEVER: u32 = 14;

/// Name of switch `i`: bit `3(r-1) + {0,1,2}` is gaze/press/loc for round
/// `r`, then bored, skip_ready_command and never_request.
pub fn switch_name(i: usize) -> String {
    assert!(i < SWITCH_COUNT, "switch index {i} out of range");
    match i as u32 {
        BORED => "bored".into(),
        SKIP => "skip_ready_command".into(),
        NEVER => "never_request".into(),
        _ => {
            let r = i / 3 + 1;
            let kind = ["gaze_ok", "press_ok", "loc_ok"][i % 3];
            format!("{kind}_{r}")
        }
    }
}

pub fn switch_index(name: &str) -> Option<usize> {
    (0..SWITCH_COUNT).find(|&i| switch_name(i) == name)
}

/// What a vector makes the human do, before any sensor noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "class", content = "attempts")]
pub enum VectorClass {
    /// Every requested leg is handed over with a good pose.
    AllOk(u8),
    /// At least one requested leg is presented with a bad pose.
    NotOk(u8),
    /// The human turns away after saying ready on the last attempt.
    Bored(u8),
    /// The human never says ready on the last attempt.
    SkipReady(u8),
    /// The human never asks for a leg.
    NeverRequest,
    /// The human stops before the first request.
    NoRequest,
}

impl VectorClass {
    pub fn attempts(&self) -> u8 {
        match *self {
            VectorClass::AllOk(n) | VectorClass::NotOk(n) | VectorClass::Bored(n) | VectorClass::SkipReady(n) => n,
            VectorClass::NeverRequest | VectorClass::NoRequest => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BeliefVector(pub u16);

impl BeliefVector {
    pub fn new(bits: u16) -> Self {
        assert!((bits as u32) < DOMAIN_SIZE, "belief vector {bits:#x} has more than 15 bits");
        Self(bits)
    }

    pub fn all() -> impl Iterator<Item = BeliefVector> {
        (0..DOMAIN_SIZE).map(|b| BeliefVector(b as u16))
    }

    pub fn get(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(mut self, i: usize, on: bool) -> Self {
        if on {
            self.0 |= 1 << i;
        } else {
            self.0 &= !(1 << i);
        }
        self
    }

    /// (gaze, pressure, location) switches of round `r` (1-based).
    pub fn round(&self, r: u8) -> (bool, bool, bool) {
        let b = 3 * (r as usize - 1);
        (self.get(b), self.get(b + 1), self.get(b + 2))
    }

    pub fn with_round(mut self, r: u8, gpl: (bool, bool, bool)) -> Self {
        let b = 3 * (r as usize - 1);
        self = self.with(b, gpl.0).with(b + 1, gpl.1);
        self.with(b + 2, gpl.2)
    }

    pub fn bored(&self) -> bool {
        self.get(BORED as usize)
    }

    pub fn skip_ready(&self) -> bool {
        self.get(SKIP as usize)
    }

    pub fn never_request(&self) -> bool {
        self.get(NEVER as usize)
    }

    /// First round whose triple is all off; that round ends the session.
    pub fn stop_round(&self) -> Option<u8> {
        (1..=ROUNDS).find(|&r| self.round(r) == (false, false, false))
    }

    pub fn class(&self) -> VectorClass {
        if self.never_request() {
            return VectorClass::NeverRequest;
        }
        let all_ok = |n: u8| (1..=n).all(|r| self.round(r) == (true, true, true));
        match self.stop_round() {
            None if all_ok(ROUNDS) => VectorClass::AllOk(ROUNDS),
            None => VectorClass::NotOk(ROUNDS),
            Some(k) if self.bored() => VectorClass::Bored(k),
            Some(k) if self.skip_ready() => VectorClass::SkipReady(k),
            Some(1) => VectorClass::NoRequest,
            Some(k) if all_ok(k - 1) => VectorClass::AllOk(k - 1),
            Some(k) => VectorClass::NotOk(k - 1),
        }
    }

    /// Beliefs that hold under this vector.
    pub fn beliefs(&self) -> Vec<Term> {
        (0..SWITCH_COUNT)
            .filter(|&i| self.get(i))
            .map(|i| Term::atom(switch_name(i)))
            .collect()
    }

    /// Switch settings as `name -> bool`, in switch order.
    pub fn named(&self) -> Vec<(String, bool)> {
        (0..SWITCH_COUNT).map(|i| (switch_name(i), self.get(i))).collect()
    }
}

/// Position `i` of the reflected binary Gray code.
pub fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}
