use crate::error::Error;
use crate::evaluator::DenseState;
use crate::phase::Phase;
use crate::scalar::ExactScalar;

/// Self-dual CSS colour code described by its face (stabiliser generator)
/// supports. Qubit i corresponds to bit i of a codeword mask and to leg i of
/// the circuit builders' output, in the documented (r, c) lattice order.
#[derive(Clone, Debug)]
pub struct ColorCode {
    pub n: usize,
    pub coords: Vec<(u32, u32)>,
    pub faces: Vec<u32>,
    pub logical_x: u32,
}

pub const TRIANGULAR_D3: &str = include_str!("../data/codes/triangular-d3.code");
pub const TRIANGULAR_D5: &str = include_str!("../data/codes/triangular-d5.code");

impl ColorCode {
    pub fn parse(text: &str) -> Result<ColorCode, Error> {
        let mut n = None;
        let mut coords = Vec::new();
        let mut faces = Vec::new();
        let mut logical_x = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            let nums: Result<Vec<u32>, _> = parts.map(|p| p.parse::<u32>()).collect();
            let nums = nums.map_err(|_| Error::Parse { line: i + 1, msg: "bad number".into() })?;
            match head {
                "n" => n = Some(nums[0] as usize),
                "qubit" => coords.push((nums[1], nums[2])),
                "face" => {
                    let mut mask = 0u32;
                    for q in nums {
                        mask |= 1 << q;
                    }
                    faces.push(mask);
                }
                "logical_x" => {
                    let mut mask = 0u32;
                    for q in nums {
                        mask |= 1 << q;
                    }
                    logical_x = Some(mask);
                }
                other => {
                    return Err(Error::Parse { line: i + 1, msg: format!("unknown entry '{other}'") });
                }
            }
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "missing n".into() })?;
        Ok(ColorCode {
            n,
            coords,
            faces,
            logical_x: logical_x.ok_or(Error::Parse { line: 0, msg: "missing logical_x".into() })?,
        })
    }

    pub fn triangular(distance: u32) -> Result<ColorCode, Error> {
        match distance {
            3 => ColorCode::parse(TRIANGULAR_D3),
            5 => ColorCode::parse(TRIANGULAR_D5),
            other => Err(Error::Precondition(format!("no committed colour code for distance {other}"))),
        }
    }

    /// All X-stabiliser codewords: the span of the face masks over GF(2),
    /// enumerated by Gaussian elimination then subset sums.
    pub fn codewords(&self) -> Vec<u32> {
        let mut basis: Vec<u32> = Vec::new();
        for &f in &self.faces {
            let mut v = f;
            for &b in &basis {
                let low = b & b.wrapping_neg();
                if v & low != 0 {
                    v ^= b;
                }
            }
            if v != 0 {
                basis.push(v);
                basis.sort_by_key(|x| x & x.wrapping_neg());
            }
        }
        let mut out = Vec::with_capacity(1 << basis.len());
        out.push(0u32);
        for &b in &basis {
            let cur = out.clone();
            out.extend(cur.into_iter().map(|x| x ^ b));
        }
        out.sort_unstable();
        out
    }

    /// Minimum weight of a logical X representative.
    pub fn distance(&self) -> u32 {
        self.codewords()
            .iter()
            .map(|c| (c ^ self.logical_x).count_ones())
            .min()
            .unwrap()
    }
}

/// The encoded magic state |0bar> + w |1bar> of the triangular colour code,
/// built directly from the committed generator data: |0bar> is the uniform
/// superposition over the X-stabiliser orbit of |0...0>, and |1bar> its
/// translate by the logical X representative.
pub fn logical_t_state(distance: u32) -> Result<DenseState, Error> {
    let code = ColorCode::triangular(distance)?;
    let mut amps = vec![ExactScalar::zero(); 1 << code.n];
    let w = ExactScalar::from_phase(Phase::T);
    for c in code.codewords() {
        amps[c as usize] = ExactScalar::one();
        amps[(c ^ code.logical_x) as usize] = w;
    }
    Ok(DenseState::from_amps(code.n, amps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn committed_codes_have_expected_parameters() {
        let d3 = ColorCode::triangular(3).unwrap();
        assert_eq!(d3.n, 7);
        assert_eq!(d3.faces.len(), 3);
        assert_eq!(d3.codewords().len(), 8);
        assert_eq!(d3.distance(), 3);
        let d5 = ColorCode::triangular(5).unwrap();
        assert_eq!(d5.n, 19);
        assert_eq!(d5.faces.len(), 9);
        assert_eq!(d5.codewords().len(), 512);
        assert_eq!(d5.distance(), 5);
    }

    #[test]
    fn faces_commute_and_logical_is_not_a_stabiliser() {
        for d in [3, 5] {
            let code = ColorCode::triangular(d).unwrap();
            for (i, &a) in code.faces.iter().enumerate() {
                assert_eq!(a.count_ones() % 2, 0, "face weight must be even");
                for &b in &code.faces[i + 1..] {
                    assert_eq!((a & b).count_ones() % 2, 0, "faces must overlap evenly");
                }
            }
            assert!(!code.codewords().contains(&code.logical_x));
        }
    }

    #[test]
    fn logical_t_state_basics() {
        let s = logical_t_state(3).unwrap();
        assert_eq!(s.legs(), 7);
        assert!(!s.is_zero());
        // <0bar|1bar> = 0: the supports are disjoint cosets
        let code = ColorCode::triangular(3).unwrap();
        let cw = code.codewords();
        for &c in &cw {
            assert!(!cw.contains(&(c ^ code.logical_x)));
        }
    }
}
