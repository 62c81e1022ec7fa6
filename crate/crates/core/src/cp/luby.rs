/// The Luby sequence 1,1,2,1,1,2,4,1,... (1-based).
pub fn luby(i: u64) -> u64 {
    assert!(i >= 1, "luby index starts at 1");
    let mut i = i;
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Restart limits `unit * luby(1), unit * luby(2), ...`.
#[derive(Debug, Clone)]
pub struct LubySchedule {
    unit: u64,
    index: u64,
}

impl LubySchedule {
    pub fn new(unit: u64) -> Self {
        LubySchedule { unit, index: 0 }
    }
}

impl Iterator for LubySchedule {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        self.index += 1;
        Some(self.unit * luby(self.index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn prefix() {
        let v: Vec<u64> = (1..=15).map(luby).collect();
        assert_eq!(v, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn scaled() {
        let v: Vec<u64> = LubySchedule::new(64).take(4).collect();
        assert_eq!(v, [64, 64, 128, 64]);
    }
}
