use num_complex::Complex64;

use crate::gate::Mat2;

pub(crate) fn apply_1q(amps: &mut [Complex64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += stride << 1;
    }
}

pub(crate) fn apply_cx(amps: &mut [Complex64], control: usize, target: usize) {
    let (cm, tm) = (1usize << control, 1usize << target);
    for i in 0..amps.len() {
        if i & cm != 0 && i & tm == 0 {
            amps.swap(i, i | tm);
        }
    }
}

pub(crate) fn apply_cz(amps: &mut [Complex64], a: usize, b: usize) {
    let mask = (1usize << a) | (1usize << b);
    for (i, amp) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *amp = -*amp;
        }
    }
}

pub(crate) fn apply_swap(amps: &mut [Complex64], a: usize, b: usize) {
    let (am, bm) = (1usize << a, 1usize << b);
    for i in 0..amps.len() {
        if i & am != 0 && i & bm == 0 {
            amps.swap(i, (i & !am) | bm);
        }
    }
}

/// Applies a Pauli (0 = I, 1 = X, 2 = Y, 3 = Z) to qubit `q`.
pub(crate) fn apply_pauli(amps: &mut [Complex64], q: usize, pauli: u8) {
    match pauli {
        0 => {}
        1 => apply_1q(amps, q, &crate::gate::X),
        2 => apply_1q(amps, q, &crate::gate::Y),
        3 => apply_1q(amps, q, &crate::gate::Z),
        _ => unreachable!("pauli code out of range"),
    }
}

pub(crate) fn conj2(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[0][1].conj()],
        [m[1][0].conj(), m[1][1].conj()],
    ]
}
