use super::dataset::{Dataset, Realization};
use super::dist::Distribution;
use crate::error::{Error, Result};

/// Default ceiling on the number of joint states any enumeration may visit.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Product space of the discrete supports of a set of objects.
#[derive(Debug, Clone)]
pub struct Space {
    pub(crate) objects: Vec<usize>,
    pub(crate) atoms: Vec<Vec<(f64, f64)>>,
}

impl Space {
    /// The subset is sorted and deduplicated; order is by object index.
    pub fn new(dataset: &Dataset, subset: &[usize], cap: u128) -> Result<Space> {
        let mut objects = subset.to_vec();
        objects.sort_unstable();
        objects.dedup();
        let mut atoms = Vec::with_capacity(objects.len());
        let mut size: u128 = 1;
        for &i in &objects {
            dataset.check_index(i)?;
            let o = &dataset.objects[i];
            let list: Vec<(f64, f64)> = match &o.dist {
                Distribution::Discrete(d) => d.atoms().iter().map(|a| (a.value, a.prob)).collect(),
                Distribution::Normal(n) if n.stddev == 0.0 => vec![(n.mean, 1.0)],
                Distribution::Normal(_) => return Err(Error::NonDiscrete { id: o.id.clone() }),
            };
            size = size.saturating_mul(list.len() as u128);
            atoms.push(list);
        }
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        Ok(Space { objects, atoms })
    }

    /// Objects of `subset` that are not point masses.
    pub fn uncertain(dataset: &Dataset, subset: &[usize], cap: u128) -> Result<Space> {
        let mut s = Self::new(dataset, subset, cap)?;
        let keep: Vec<bool> = s.atoms.iter().map(|a| a.len() > 1).collect();
        let mut k = keep.iter();
        s.objects.retain(|_| *k.next().unwrap());
        s.atoms.retain(|a| a.len() > 1);
        Ok(s)
    }

    pub fn objects(&self) -> &[usize] {
        &self.objects
    }

    pub fn size(&self) -> u128 {
        self.atoms.iter().map(|a| a.len() as u128).product()
    }

    /// Visits every joint state in lexicographic order, writing the state into
    /// `values` (other entries are left alone) and passing its probability.
    pub fn for_each(&self, values: &mut [f64], mut f: impl FnMut(&[f64], f64)) {
        let k = self.objects.len();
        if k == 0 {
            f(values, 1.0);
            return;
        }
        let mut pos = vec![0usize; k];
        // prefix[j] = probability of the first j coordinates.
        let mut prefix = vec![1.0; k + 1];
        for j in 0..k {
            let (v, p) = self.atoms[j][0];
            values[self.objects[j]] = v;
            prefix[j + 1] = prefix[j] * p;
        }
        loop {
            f(values, prefix[k]);
            let mut j = k;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                pos[j] += 1;
                if pos[j] < self.atoms[j].len() {
                    break;
                }
                pos[j] = 0;
            }
            for l in j..k {
                let (v, p) = self.atoms[l][pos[l]];
                values[self.objects[l]] = v;
                prefix[l + 1] = prefix[l] * p;
            }
        }
    }
}

/// Streaming enumeration of the joint outcomes of a subset of objects.
pub struct Realizations {
    space: Space,
    pos: Vec<usize>,
    done: bool,
}

impl Iterator for Realizations {
    type Item = Realization;

    fn next(&mut self) -> Option<Realization> {
        if self.done {
            return None;
        }
        let k = self.space.objects.len();
        let mut probability = 1.0;
        let mut assignment = Vec::with_capacity(k);
        for j in 0..k {
            let (v, p) = self.space.atoms[j][self.pos[j]];
            probability *= p;
            assignment.push((self.space.objects[j], v));
        }
        let mut j = k;
        loop {
            if j == 0 {
                self.done = true;
                break;
            }
            j -= 1;
            self.pos[j] += 1;
            if self.pos[j] < self.space.atoms[j].len() {
                break;
            }
            self.pos[j] = 0;
        }
        Some(Realization {
            assignment,
            probability,
        })
    }
}

/// All joint outcomes of `subset`, lexicographic by object index then support index.
pub fn enumerate_realizations(dataset: &Dataset, subset: &[usize], cap: u128) -> Result<Realizations> {
    if !dataset.is_independent() {
        return Err(Error::Dependent);
    }
    let space = Space::new(dataset, subset, cap)?;
    let k = space.objects.len();
    Ok(Realizations {
        space,
        pos: vec![0; k],
        done: false,
    })
}
