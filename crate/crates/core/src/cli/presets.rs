use super::config::{DephasingModel, GridSpec, OutputConfig, RunConfig, ScenarioConfig, Tolerances};
use crate::dephasing::{FrequencyDistribution, DEFAULT_BINS, DEFAULT_WINDOW};
use crate::spinchain::{SpinChainSpec, DEFAULT_DIM_CAP};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: [Preset; 6] = [
    Preset {
        name: "fig2a",
        description: "double Lorentzian, equal centers, delta2/delta1 = 10, r = 1",
    },
    Preset {
        name: "fig2b",
        description: "double Lorentzian, centers 1 and 9, equal widths, r = 1",
    },
    Preset {
        name: "fig2c",
        description: "r-sweep 0..1 of the fig2b distribution at t' = 0.3",
    },
    Preset {
        name: "fig3",
        description: "spin coupled to an 8-site XX chain, J0/J = 1, B/J = 0.01",
    },
    Preset {
        name: "semigroup",
        description: "single Lorentzian, memoryless dephasing",
    },
    Preset {
        name: "bell-check",
        description: "correlation norm of a Bell state, expected 3/2",
    },
];

pub fn list_presets() -> String {
    PRESETS.iter().map(|p| format!("{:<11} {}\n", p.name, p.description)).collect()
}

fn dephasing(distribution: FrequencyDistribution) -> ScenarioConfig {
    ScenarioConfig::Dephasing {
        distribution,
        model: DephasingModel::Analytic,
        bins: DEFAULT_BINS,
        window: DEFAULT_WINDOW,
    }
}

fn config(scenario: ScenarioConfig, t: GridSpec, tprime: Option<GridSpec>) -> RunConfig {
    RunConfig {
        scenario,
        t_grid: Some(t),
        tprime_grid: tprime,
        tolerances: Tolerances::default(),
        output: OutputConfig::default(),
    }
}

const SQUARE_50: GridSpec = GridSpec::new(0.0, 3.0, 50);
const SQUARE_40: GridSpec = GridSpec::new(0.0, 3.0, 40);

pub fn preset(name: &str) -> Option<RunConfig> {
    let cfg = match name {
        "semigroup" => config(
            dephasing(FrequencyDistribution::SingleLorentzian { omega0: 1.0, delta: 1.0 }),
            SQUARE_50,
            Some(SQUARE_50),
        ),
        "fig2a" => config(
            dephasing(FrequencyDistribution::DoubleLorentzian {
                omega0_1: 1.0,
                delta1: 1.0,
                omega0_2: 1.0,
                delta2: 10.0,
                r: 1.0,
            }),
            SQUARE_50,
            Some(SQUARE_50),
        ),
        "fig2b" => config(
            dephasing(FrequencyDistribution::DoubleLorentzian {
                omega0_1: 1.0,
                delta1: 1.0,
                omega0_2: 9.0,
                delta2: 1.0,
                r: 1.0,
            }),
            SQUARE_50,
            Some(SQUARE_50),
        ),
        "fig2c" => config(
            ScenarioConfig::RSweep {
                omega0_1: 1.0,
                delta1: 1.0,
                omega0_2: 9.0,
                delta2: 1.0,
                r_values: (0..=20).map(|i| i as f64 * 0.05).collect(),
                tprime: 0.3,
            },
            GridSpec::new(0.0, 20.0, 401),
            None,
        ),
        "fig3" => config(
            ScenarioConfig::SpinChain(SpinChainSpec { n: 8, j: 1.0, j0: 1.0, bfield: 0.01, cap: DEFAULT_DIM_CAP }),
            SQUARE_40,
            Some(SQUARE_40),
        ),
        "bell-check" => RunConfig {
            scenario: ScenarioConfig::BellCheck,
            t_grid: None,
            tprime_grid: None,
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        },
        _ => return None,
    };
    Some(cfg)
}
