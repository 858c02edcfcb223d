/// Resource guards shared by every analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of strategy profiles (or belief states) to materialize.
    pub profile_guard: u64,
    /// Maximum number of expansions for the bounded searches.
    pub search_budget: u64,
    /// Ignore `profile_guard`.
    pub force: bool,
    /// Use the rayon pool when the `parallel` feature is compiled in.
    pub parallel: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            profile_guard: 10_000_000,
            search_budget: 100_000,
            force: false,
            parallel: true,
        }
    }
}

impl Limits {
    pub fn sequential() -> Self {
        Limits {
            parallel: false,
            ..Limits::default()
        }
    }

    pub(crate) fn check_count(&self, count: u128) -> crate::Result<u64> {
        if !self.force && count > self.profile_guard as u128 {
            return Err(crate::Error::StateSpaceTooLarge {
                count,
                guard: self.profile_guard,
            });
        }
        u64::try_from(count).map_err(|_| crate::Error::StateSpaceTooLarge {
            count,
            guard: self.profile_guard,
        })
    }
}
