//! Classical network coding on the butterfly network.

/// Sends bits `x` (from s1) and `y` (from s2) to t1 and t2 respectively
/// through a single bottleneck edge: the bottleneck carries `x ⊕ y`, and each
/// sink XORs it with the bit it receives directly from the other source.
pub fn classical_butterfly(x: u8, y: u8) -> (u8, u8) {
    let (x, y) = (x & 1, y & 1);
    let bottleneck = x ^ y;
    let t1 = bottleneck ^ y;
    let t2 = bottleneck ^ x;
    (t1, t2)
}
