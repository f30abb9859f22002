//! Polynomial lifting of point coordinates.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::point::Point3;

/// Exponents of `(x, y, z)` for `x, y, z, x², y², z², xy, xz, yz`.
pub const ORDER2_EXPONENTS: [[u8; 3]; 9] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [0, 2, 0],
    [0, 0, 2],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
];

/// Exponents of `x³, y³, z³, x²y, x²z, y²x, y²z, z²x, z²y, xyz`.
pub const CUBIC_EXPONENTS: [[u8; 3]; 10] = [
    [3, 0, 0],
    [0, 3, 0],
    [0, 0, 3],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [0, 2, 1],
    [1, 0, 2],
    [0, 1, 2],
    [1, 1, 1],
];

/// Exponent table of the lift at `order` (2 → 9 entries, 3 → 19 entries).
pub fn lift_exponents(order: usize) -> Result<Vec<Vec<u8>>> {
    let mut table: Vec<Vec<u8>> = ORDER2_EXPONENTS.iter().map(|e| e.to_vec()).collect();
    match order {
        2 => {}
        3 => table.extend(CUBIC_EXPONENTS.iter().map(|e| e.to_vec())),
        other => return Err(Error::UnsupportedOrder(other)),
    }
    Ok(table)
}

/// `Πᵢ xᵢ^eᵢ`, multiplied factor by factor in coordinate order so the result
/// is reproducible bit-for-bit.
pub fn eval_monomial<T: Real>(exponents: &[u8], coords: &[T]) -> T {
    let mut acc: Option<T> = None;
    for (&e, &x) in exponents.iter().zip(coords) {
        for _ in 0..e {
            acc = Some(match acc {
                None => x,
                Some(a) => a * x,
            });
        }
    }
    acc.unwrap_or_else(T::one)
}

/// `∂/∂xᵢ Πⱼ xⱼ^eⱼ`.
pub fn monomial_partial<T: Real>(exponents: &[u8], coords: &[T], i: usize) -> T {
    let e = exponents[i];
    if e == 0 {
        return T::zero();
    }
    let mut reduced = exponents.to_vec();
    reduced[i] -= 1;
    T::from_u8(e).expect("small exponent") * eval_monomial(&reduced, coords)
}

/// Monomial features of a point: order 2 gives
/// `(x, y, z, x², y², z², xy, xz, yz)`, order 3 appends the ten cubic terms.
pub fn polynomial_lift<T: Real>(point: Point3<T>, order: usize) -> Result<Vec<T>> {
    let coords = point.to_array();
    Ok(lift_exponents(order)?.iter().map(|e| eval_monomial(e, &coords)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_two_examples() {
        let p = |x, y, z| Point3::new(x, y, z);
        assert_eq!(polynomial_lift(p(1.0, 0.0, 0.0), 2).unwrap(), vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(polynomial_lift(p(1.0, 2.0, 3.0), 2).unwrap(), vec![1.0, 2.0, 3.0, 1.0, 4.0, 9.0, 2.0, 3.0, 6.0]);
    }

    #[test]
    fn order_three_of_origin_is_zero() {
        assert_eq!(polynomial_lift(Point3::<f64>::zero(), 3).unwrap(), vec![0.0; 19]);
    }

    #[test]
    fn order_three_values() {
        let l = polynomial_lift(Point3::new(1.0, 2.0, 3.0), 3).unwrap();
        assert_eq!(&l[9..], &[1.0, 8.0, 27.0, 2.0, 3.0, 4.0, 12.0, 9.0, 18.0, 6.0]);
    }

    #[test]
    fn unsupported_order() {
        assert!(matches!(polynomial_lift(Point3::new(1.0, 1.0, 1.0), 4), Err(Error::UnsupportedOrder(4))));
    }

    #[test]
    fn partials() {
        let c = [2.0, 3.0, 5.0];
        assert_eq!(monomial_partial(&[2, 1, 0], &c, 0), 12.0);
        assert_eq!(monomial_partial(&[2, 1, 0], &c, 1), 4.0);
        assert_eq!(monomial_partial(&[2, 1, 0], &c, 2), 0.0);
    }
}
