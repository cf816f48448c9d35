/// Hard limits on the sizes of intermediate structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_power_positions: usize,
    pub max_nba_states: usize,
    pub max_dpa_states: usize,
    pub max_product: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_power_positions: 1_000_000,
            max_nba_states: 1 << 20,
            max_dpa_states: 1 << 20,
            max_product: 10_000_000,
        }
    }
}

/// Pipeline settings shared by synthesis and checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub caps: Caps,
    /// Worker threads for per-position model checks during marking.
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            caps: Caps::default(),
            jobs: 1,
        }
    }
}
