use crate::network::{Connection, NetworkDesc};

use super::{Model, Neuron, Step, Synapse};

/// Two populations of 100 neurons that take turns exciting each other.
/// A neuron spikes on the step after it received a spike.
#[derive(Clone, Copy, Debug, Default)]
pub struct PingPong;

impl PingPong {
    /// Populations {100, 100}, p = 0.01 both ways, dt = 1 ms, delay 1.
    pub fn build() -> (NetworkDesc, PingPong) {
        let desc = NetworkDesc::new(
            vec![100, 100],
            vec![Connection::new(0, 1, 0.01), Connection::new(1, 0, 0.01)],
            1.0,
            1,
        );
        (desc, PingPong)
    }
}

impl Model for PingPong {
    type Neuron = (bool,);
    type Synapse = ();

    fn init(&self, n: Neuron<'_, (bool,)>, _: &Step) {
        n.set::<0>(n.id() < 100);
    }

    fn update(&self, n: Neuron<'_, (bool,)>, _: &Step) -> bool {
        let spike = n.get::<0>();
        n.set::<0>(false);
        spike
    }

    fn receive(&self, _: Neuron<'_, (bool,)>, to: Neuron<'_, (bool,)>, _: Synapse<'_, ()>) {
        to.set::<0>(true);
    }
}
