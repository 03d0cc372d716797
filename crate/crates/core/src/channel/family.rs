use crate::error::{check_dim, Error, Result};
use crate::prob::StochasticMatrix;

/// A state-indexed family of channels `W(·|·, s)`, all sharing one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFamily {
    states: Vec<StochasticMatrix>,
}

impl ChannelFamily {
    pub fn new(states: Vec<StochasticMatrix>) -> Result<Self> {
        let first = states.first().ok_or(Error::Empty)?;
        let (n_in, n_out) = (first.n_in(), first.n_out());
        for m in &states[1..] {
            check_dim(n_in, m.n_in(), "family input alphabet")?;
            check_dim(n_out, m.n_out(), "family output alphabet")?;
        }
        Ok(Self { states })
    }

    pub fn n_in(&self) -> usize {
        self.states[0].n_in()
    }

    pub fn n_out(&self) -> usize {
        self.states[0].n_out()
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, s: usize) -> &StochasticMatrix {
        &self.states[s]
    }

    pub fn states(&self) -> &[StochasticMatrix] {
        &self.states
    }

    /// `W(y|x,s)`.
    #[inline]
    pub fn prob(&self, x: usize, s: usize, y: usize) -> f64 {
        self.states[s].get(x, y)
    }

    /// The `k`-letter extension: inputs `X^k`, states `S^k`, outputs `Y^k`,
    /// all indexed lexicographically.
    pub fn extension(&self, k: usize) -> ChannelFamily {
        if k == 1 {
            return self.clone();
        }
        let ns = self.n_states();
        let total = ns.pow(k as u32);
        let mut digits = vec![0usize; k];
        let states = (0..total)
            .map(|idx| {
                crate::simplex::index_to_tuple(idx, ns, k, &mut digits);
                let mut acc = StochasticMatrix::identity(1);
                for &s in &digits {
                    acc = acc.kron(&self.states[s]);
                }
                acc
            })
            .collect();
        ChannelFamily { states }
    }
}

/// An arbitrarily varying wiretap channel: the legitimate family `W` (to Bob)
/// and the eavesdropper family `V` (to Eve), indexed by a common state.
#[derive(Debug, Clone, PartialEq)]
pub struct AvwcPair {
    legit: ChannelFamily,
    eve: ChannelFamily,
}

impl AvwcPair {
    pub fn new(legit: ChannelFamily, eve: ChannelFamily) -> Result<Self> {
        check_dim(legit.n_in(), eve.n_in(), "input alphabet of W vs V")?;
        check_dim(legit.n_states(), eve.n_states(), "state count of W vs V")?;
        Ok(Self { legit, eve })
    }

    pub fn from_matrices(w: Vec<StochasticMatrix>, v: Vec<StochasticMatrix>) -> Result<Self> {
        Self::new(ChannelFamily::new(w)?, ChannelFamily::new(v)?)
    }

    pub fn legit(&self) -> &ChannelFamily {
        &self.legit
    }

    pub fn eve(&self) -> &ChannelFamily {
        &self.eve
    }

    pub fn n_inputs(&self) -> usize {
        self.legit.n_in()
    }

    pub fn n_legit_outputs(&self) -> usize {
        self.legit.n_out()
    }

    pub fn n_eve_outputs(&self) -> usize {
        self.eve.n_out()
    }

    pub fn n_states(&self) -> usize {
        self.legit.n_states()
    }
}
