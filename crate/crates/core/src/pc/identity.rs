use super::subgroup::characteristic_subgroups;
use super::{ExponentVector, PcPresentation};
use crate::error::{Error, Result};

/// Checks `[x^n, y] = [x,y]^n [x,y,x]^C(n,2) [x,y,x,x]^C(n,3) [x,y,x,x,x]^C(n,4)
/// [x,y,x,[x,y]]^s(n)` with `s(n) = n(n-1)(2n-1)/6`, valid in class at most 5.
pub fn verify_power_commutator_identity(
    g: &PcPresentation,
    x: &ExponentVector,
    y: &ExponentVector,
    n: u64,
) -> Result<bool> {
    let class = characteristic_subgroups(g).class;
    if class > 5 {
        return Err(Error::ClassTooLarge(class));
    }
    g.validate(x)?;
    g.validate(y)?;
    let n = n as i64;
    let lhs = g.comm(&g.pow(x, n), y);

    let xy = g.comm(x, y);
    let xyx = g.comm(&xy, x);
    let xyxx = g.comm(&xyx, x);
    let xyxxx = g.comm(&xyxx, x);
    let xyx_xy = g.comm(&xyx, &xy);
    let c2 = n * (n - 1) / 2;
    let c3 = n * (n - 1) * (n - 2) / 6;
    let c4 = n * (n - 1) * (n - 2) * (n - 3) / 24;
    let s = n * (n - 1) * (2 * n - 1) / 6;
    let rhs = [(xy, n), (xyx, c2), (xyxx, c3), (xyxxx, c4), (xyx_xy, s)]
        .iter()
        .fold(g.identity(), |acc, (c, e)| g.mul(&acc, &g.pow(c, *e)));
    Ok(lhs == rhs)
}
