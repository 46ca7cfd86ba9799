//! Initial-state estimation for networks whose dependency graph is an SOG.
//!
//! Along an observed path every non-head vertex has a single input, so its
//! rule is either identity or negation. The sensor at the end of the path
//! therefore reads `x_i[0]`, possibly negated, after exactly as many steps as
//! there are edges between `v_i` and the sensor.

use serde::Serialize;
use thiserror::Error;

use super::pinning::PinningPlan;
use crate::boolnet::BooleanNetwork;
use crate::sog::decompose_observed_paths;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObserverError {
    #[error("dependency graph of the network is not structurally observable")]
    NotSog,
    #[error("x{node} has input x{input} on its observed path but its rule is not a copy or negation of it")]
    NotInvertible { node: usize, input: usize },
    #[error("output series has {got} samples, at least {needed} needed")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("outputs at time {time} disagree with the reconstructed initial state")]
    Inconsistent { time: usize },
}

/// How to read `x_node[0]`: sensor `sensor` at time `delay`, negated if `negated`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Estimate {
    pub node: usize,
    pub sensor: usize,
    pub delay: usize,
    /// Vertices from `node` to `sensor`.
    pub chain: Vec<usize>,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Observer {
    #[serde(skip)]
    pub network: BooleanNetwork,
    pub paths: Vec<Vec<usize>>,
    /// One entry per node, in node order.
    pub schedule: Vec<Estimate>,
}

impl Observer {
    /// Build an observer for any network with an SOG dependency graph.
    pub fn for_network(network: &BooleanNetwork) -> Result<Observer, ObserverError> {
        let g = network.dependency_graph();
        let cover = decompose_observed_paths(&g).ok_or(ObserverError::NotSog)?;
        let mut schedule = Vec::with_capacity(network.n());
        for path in &cover.paths {
            let sensor = *path.last().expect("paths are non-empty");
            // flip[t]: whether the rule of path[t] negates path[t - 1]
            let mut flip = vec![false; path.len()];
            for t in 1..path.len() {
                let f = network.function(path[t]);
                flip[t] = match (f.inputs.as_slice(), f.table.as_slice()) {
                    ([u], [false, true]) if *u == path[t - 1] => false,
                    ([u], [true, false]) if *u == path[t - 1] => true,
                    _ => {
                        return Err(ObserverError::NotInvertible {
                            node: path[t],
                            input: path[t - 1],
                        })
                    }
                };
            }
            for j in 0..path.len() {
                schedule.push(Estimate {
                    node: path[j],
                    sensor,
                    delay: path.len() - 1 - j,
                    chain: path[j..].to_vec(),
                    negated: flip[j + 1..].iter().fold(false, |a, &b| a ^ b),
                });
            }
        }
        schedule.sort_by_key(|e| e.node);
        Ok(Observer {
            network: network.clone(),
            paths: cover.paths,
            schedule,
        })
    }

    /// Number of output samples the estimate needs.
    pub fn horizon(&self) -> usize {
        self.schedule.iter().map(|e| e.delay).max().unwrap_or(0) + 1
    }
}

/// Observer for the pinned network of `pinning`. The original network only
/// fixes the node count and is checked against the pinned one.
pub fn build_observer(bn: &BooleanNetwork, pinning: &PinningPlan) -> Result<Observer, ObserverError> {
    debug_assert_eq!(bn.n(), pinning.network.n());
    Observer::for_network(&pinning.network)
}

/// Recover `x[0]` from output samples `y[0], y[1], ...` (bit `p` of each
/// sample holds the `p`-th output). All given samples are checked against
/// the recovered state.
pub fn estimate_initial_state(obs: &Observer, outputs: &[u64]) -> Result<u64, ObserverError> {
    let needed = obs.horizon();
    if outputs.len() < needed {
        return Err(ObserverError::SeriesTooShort {
            needed,
            got: outputs.len(),
        });
    }
    let sensor_bit = |v: usize| obs.network.outputs().iter().position(|&o| o == v).expect("sensor is an output");
    let mut x0 = 0u64;
    for e in &obs.schedule {
        let y = outputs[e.delay] >> sensor_bit(e.sensor) & 1 == 1;
        x0 |= u64::from(y ^ e.negated) << (e.node - 1);
    }
    let replay = obs.network.simulate(x0, outputs.len() - 1);
    if let Some(time) = replay.outputs.iter().zip(outputs).position(|(a, b)| a != b) {
        return Err(ObserverError::Inconsistent { time });
    }
    Ok(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolnet::parse_bn;

    #[test]
    fn sensor_reads_itself() {
        let bn = parse_bn("x1 = x1\noutputs: x1").unwrap().network;
        let obs = Observer::for_network(&bn).unwrap();
        assert_eq!(obs.schedule[0].delay, 0);
        assert_eq!(estimate_initial_state(&obs, &[1]).unwrap(), 1);
        assert_eq!(estimate_initial_state(&obs, &[0]).unwrap(), 0);
    }

    #[test]
    fn double_negation() {
        let bn = parse_bn("x1 = x1\nx2 = !x1\nx3 = !x2\noutputs: x3").unwrap().network;
        let obs = Observer::for_network(&bn).unwrap();
        let e1 = &obs.schedule[0];
        assert_eq!((e1.sensor, e1.delay, e1.negated), (3, 2, false));
        assert!(obs.schedule[1].negated);
        for x0 in 0..8 {
            let y = bn.simulate(x0, 2).outputs;
            assert_eq!(estimate_initial_state(&obs, &y).unwrap(), x0);
        }
    }

    #[test]
    fn short_and_corrupted_series() {
        let bn = parse_bn("x1 = x1\nx2 = !x1\nx3 = !x2\noutputs: x3").unwrap().network;
        let obs = Observer::for_network(&bn).unwrap();
        assert_eq!(
            estimate_initial_state(&obs, &[0, 1]),
            Err(ObserverError::SeriesTooShort { needed: 3, got: 2 })
        );
        // x1 is constant, so y[2] and y[3] must agree
        assert_eq!(estimate_initial_state(&obs, &[0, 1, 1, 0]), Err(ObserverError::Inconsistent { time: 3 }));
    }

    #[test]
    fn rejects_non_sog() {
        let bn = parse_bn("x1 = x2 & x3\nx2 = x2\nx3 = x3\noutputs: x1").unwrap().network;
        assert_eq!(Observer::for_network(&bn), Err(ObserverError::NotSog));
    }
}
