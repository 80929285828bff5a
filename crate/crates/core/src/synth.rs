//! Seeded synthetic contexts: small uniform ones for property tests and
//! larger ones shaped like the usual benchmark datasets.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::context::{Dim, ElemId, ElementDictionary, TriadicContext};

/// Every cell present independently with probability `density`.
pub fn uniform(sizes: [usize; 3], density: f64, seed: u64) -> TriadicContext {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut triples = Vec::new();
    for a in 0..sizes[0] as ElemId {
        for b in 0..sizes[1] as ElemId {
            for c in 0..sizes[2] as ElemId {
                if rng.gen_bool(density) {
                    triples.push([a, b, c]);
                }
            }
        }
    }
    TriadicContext::from_parts(numbered_dictionaries(sizes), triples).expect("ids in range")
}

/// Objects drawn from a fixed pool of prototypes, the way specimens of one
/// species share most of their attribute/condition cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrototypeShape {
    pub objects: usize,
    pub attributes: usize,
    pub conditions: usize,
    /// Number of distinct prototypes.
    pub prototypes: usize,
    /// Fraction of attribute x condition cells set in a prototype.
    pub density: f64,
    /// Probability that an object drops a cell of its prototype.
    pub dropout: f64,
    pub seed: u64,
}

impl PrototypeShape {
    /// 8416 objects x 32 attributes x 4 conditions.
    pub fn mushroom() -> Self {
        PrototypeShape {
            objects: 8416,
            attributes: 32,
            conditions: 4,
            prototypes: 64,
            density: 0.15,
            dropout: 0.0,
            seed: 7,
        }
    }

    pub fn generate(&self) -> TriadicContext {
        let mut rng = StdRng::seed_from_u64(self.seed);
        let cells = self.attributes * self.conditions;
        let protos: Vec<Vec<usize>> = (0..self.prototypes.max(1))
            .map(|_| (0..cells).filter(|_| rng.gen_bool(self.density)).collect())
            .collect();
        let mut triples = Vec::new();
        for o in 0..self.objects {
            let proto = protos.choose(&mut rng).expect("at least one prototype");
            for &cell in proto {
                if self.dropout > 0.0 && rng.gen_bool(self.dropout) {
                    continue;
                }
                triples.push([
                    o as ElemId,
                    (cell / self.conditions) as ElemId,
                    (cell % self.conditions) as ElemId,
                ]);
            }
        }
        let sizes = [self.objects, self.attributes, self.conditions];
        TriadicContext::from_parts(numbered_dictionaries(sizes), triples).expect("ids in range")
    }
}

/// Customers buying items over months: each transaction date is reduced to
/// its year-month bucket, so the conditions are `2014-01` .. `2015-12`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasketShape {
    pub customers: usize,
    pub items: usize,
    pub first_year: u32,
    pub months: usize,
    /// Mean number of shopping trips per customer.
    pub trips: f64,
    /// Mean basket size.
    pub basket: f64,
    /// Items each customer buys preferentially.
    pub favourites: usize,
    pub seed: u64,
}

impl BasketShape {
    /// 3898 customers x 167 items x 24 months.
    pub fn groceries() -> Self {
        BasketShape {
            customers: 3898,
            items: 167,
            first_year: 2014,
            months: 24,
            trips: 5.0,
            basket: 2.5,
            favourites: 6,
            seed: 11,
        }
    }

    pub fn month_label(&self, bucket: usize) -> String {
        format!("{}-{:02}", self.first_year as usize + bucket / 12, bucket % 12 + 1)
    }

    pub fn generate(&self) -> TriadicContext {
        let mut rng = StdRng::seed_from_u64(self.seed);
        // skewed item popularity: weight 1/(rank+1)
        let weights: Vec<f64> = (0..self.items).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let total: f64 = weights.iter().sum();
        let draw_item = |rng: &mut StdRng| -> usize {
            let mut x = rng.gen::<f64>() * total;
            for (i, w) in weights.iter().enumerate() {
                if x < *w {
                    return i;
                }
                x -= w;
            }
            weights.len() - 1
        };

        let mut triples = Vec::new();
        for c in 0..self.customers {
            let favs: Vec<usize> = (0..self.favourites).map(|_| draw_item(&mut rng)).collect();
            let trips = poisson(&mut rng, self.trips).max(1);
            for _ in 0..trips {
                let month = rng.gen_range(0..self.months);
                let size = poisson(&mut rng, self.basket).max(1);
                for _ in 0..size {
                    let item = if !favs.is_empty() && rng.gen_bool(0.7) {
                        *favs.choose(&mut rng).expect("non-empty")
                    } else {
                        draw_item(&mut rng)
                    };
                    triples.push([c as ElemId, item as ElemId, month as ElemId]);
                }
            }
        }
        let dicts = [
            ElementDictionary::from_labels(Dim::Object, (0..self.customers).map(|i| format!("c{i}"))),
            ElementDictionary::from_labels(Dim::Attribute, (0..self.items).map(|i| format!("i{i}"))),
            ElementDictionary::from_labels(Dim::Condition, (0..self.months).map(|m| self.month_label(m))),
        ];
        TriadicContext::from_parts(dicts, triples).expect("ids in range")
    }
}

fn poisson(rng: &mut StdRng, mean: f64) -> usize {
    // Knuth; means here are small
    let limit = (-mean).exp();
    let mut k = 0;
    let mut p = rng.gen::<f64>();
    while p > limit {
        k += 1;
        p *= rng.gen::<f64>();
    }
    k
}

/// Dictionaries labelled `o0.., a0.., c0..`.
pub fn numbered_dictionaries(sizes: [usize; 3]) -> [ElementDictionary; 3] {
    let prefix = ["o", "a", "c"];
    Dim::ALL
        .map(|d| ElementDictionary::from_labels(d, (0..sizes[d.index()]).map(|i| format!("{}{i}", prefix[d.index()]))))
}
