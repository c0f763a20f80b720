use tbf_core::dynamics::*;
use tbf_core::pulse::CosineCouplingPulse;
use tbf_core::system::SystemParams;

const TAU: f64 = std::f64::consts::TAU;

fn main() {
    let p = SystemParams::<f64>::default_device();
    let m = ModelParams::new(&p);
    let opts = IntegrationOptions::default();
    let window = 0.95e-6;
    println!("width_ns start_ns  eta_gen  p_e0_sc  P_f0_end");
    for width_ns in [540.0, 560.0, 580.0, 600.0, 620.0] {
        for start_ns in [40.0, 80.0, 100.0, 140.0] {
            let pulse = CosineCouplingPulse {
                start: start_ns * 1e-9,
                width: width_ns * 1e-9,
                peak: TAU * 1.3e6,
                chirp_coeff: TAU * -1.66e6,
                phase: 0.0,
            };
            let stark = StarkInjection { coeff: TAU * 1.66e6, reference_amplitude: pulse.peak };
            let (rep, res) =
                generation_efficiency(&m, &pulse, Some(&stark), window, &opts).unwrap();
            println!(
                "{width_ns:8.0} {start_ns:8.0} {:.4} {:.4} {:.5}",
                rep.eta_gen, rep.p_e0_sc, res.last().f0f0().re
            );
        }
    }
}
