//! The explicit identity families: f_T, r_T, the alternating sums g_m, the
//! h-family built from them, and the generating sets for each grading's
//! ideal of identities.

use crate::field::{FieldElement, FieldSpec};
use crate::freealg::{left_normed, FreePolynomial, Variable};
use crate::gradings::Grading;

/// f_T over the given z-slots: the slots at positions listed in `t` (even
/// count, strictly increasing) become a chain of commutator pairs, the rest
/// a bare product in position order.
pub fn f_t_at(slots: &[Variable], t: &[usize], field: &FieldSpec) -> FreePolynomial {
    debug_assert!(t.len().is_multiple_of(2));
    debug_assert!(t.windows(2).all(|w| w[0] < w[1]));
    let mut bare: Vec<Variable> = Vec::new();
    for (i, v) in slots.iter().enumerate() {
        if !t.contains(&i) {
            bare.push(*v);
        }
    }
    let mut acc = FreePolynomial::monomial(bare, field.one());
    for pair in t.chunks(2) {
        let c = left_normed(&[slots[pair[0]], slots[pair[1]]], field)
            .expect("pair has two entries");
        acc = acc.mul(&c, field);
    }
    acc
}

/// r_T over y and the z-slots: positions in `t` (odd count) are used as
/// [y, z_{j1}][z_{j2}, z_{j3}]..., the rest as a bare product.
pub fn r_t_at(y: Variable, slots: &[Variable], t: &[usize], field: &FieldSpec) -> FreePolynomial {
    debug_assert!(t.len() % 2 == 1);
    let mut bare: Vec<Variable> = Vec::new();
    for (i, v) in slots.iter().enumerate() {
        if !t.contains(&i) {
            bare.push(*v);
        }
    }
    let mut acc = FreePolynomial::monomial(bare, field.one());
    let first = left_normed(&[y, slots[t[0]]], field).expect("two entries");
    acc = acc.mul(&first, field);
    for pair in t[1..].chunks(2) {
        let c = left_normed(&[slots[pair[0]], slots[pair[1]]], field)
            .expect("pair has two entries");
        acc = acc.mul(&c, field);
    }
    acc
}

/// (-2)^(-t/2) in the field.
fn g_coeff(t: usize, field: &FieldSpec) -> FieldElement {
    let minus_two = field.neg(field.element(2));
    let pow = field.pow(minus_two, (t / 2) as u64);
    field.inv(pow).expect("-2 is a unit in odd characteristic")
}

/// g_m evaluated at the given slot variables (repeats allowed):
/// the sum of (-2)^(-|T|/2) f_T over even-size position subsets T.
/// For a single slot this is the slot itself.
pub fn g_m_at(slots: &[Variable], field: &FieldSpec) -> FreePolynomial {
    let m = slots.len();
    assert!(m >= 1);
    if m == 1 {
        return FreePolynomial::var(slots[0], field);
    }
    let mut acc = FreePolynomial::zero();
    for mask in 0..(1u32 << m) {
        let t_size = mask.count_ones() as usize;
        if !t_size.is_multiple_of(2) {
            continue;
        }
        let t: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let term = f_t_at(slots, &t, field).scale(g_coeff(t_size, field), field);
        acc = acc.add(&term, field);
    }
    acc
}

/// g_m on the standard slots z_1..z_m.
pub fn g_m(m: usize, field: &FieldSpec) -> FreePolynomial {
    let slots: Vec<Variable> = (1..=m as u32).map(Variable::z).collect();
    g_m_at(&slots, field)
}

fn y_pairs(start: u32, pairs: u32, field: &FieldSpec) -> FreePolynomial {
    let mut acc = FreePolynomial::one(field);
    for i in 0..pairs {
        let a = Variable::y(start + 2 * i);
        let b = Variable::y(start + 2 * i + 1);
        acc = acc.mul(&left_normed(&[a, b], field).unwrap(), field);
    }
    acc
}

/// h1 = `[y1,y2]...[yk,y(k+1)]`, an identity of G_k for odd k.
pub fn h1(k: u32, field: &FieldSpec) -> FreePolynomial {
    assert!(k % 2 == 1);
    y_pairs(1, k.div_ceil(2), field)
}

/// h2 = `[y1,y2]...[y(k-1),yk][y(k+1),x]`, an identity of G_k for even k;
/// x is any variable distinct from y1..y(k+1).
pub fn h2(k: u32, x: Variable, field: &FieldSpec) -> FreePolynomial {
    assert!(k.is_multiple_of(2));
    let head = y_pairs(1, k / 2, field);
    let last = left_normed(&[Variable::y(k + 1), x], field).unwrap();
    head.mul(&last, field)
}

/// h3 = `g_{k-l+2}(z1..z_{k-l+2}) [y1,y2]...[y(l-1),yl]`, for even l <= k.
pub fn h3(k: u32, l: u32, field: &FieldSpec) -> FreePolynomial {
    assert!(l.is_multiple_of(2) && l <= k);
    let g = g_m((k - l + 2) as usize, field);
    g.mul(&y_pairs(1, l / 2, field), field)
}

/// h4 = `g_{k-l+2}(z1..) [z_{k-l+3}, y1][y2,y3]...[y(l-1),yl]`, for odd l <= k.
pub fn h4(k: u32, l: u32, field: &FieldSpec) -> FreePolynomial {
    assert!(l % 2 == 1 && l <= k);
    let m = k - l + 2;
    let g = g_m(m as usize, field);
    let mixed = left_normed(&[Variable::z(m + 1), Variable::y(1)], field).unwrap();
    let mut acc = g.mul(&mixed, field);
    acc = acc.mul(&y_pairs(2, (l - 1) / 2, field), field);
    acc
}

/// h5 = `[g_{k-l+2}(z1..), y1][y2,y3]...[y(l-1),yl]`, for odd l <= k.
pub fn h5(k: u32, l: u32, field: &FieldSpec) -> FreePolynomial {
    assert!(l % 2 == 1 && l <= k);
    let g = g_m((k - l + 2) as usize, field);
    let c = g.commutator(&FreePolynomial::var(Variable::y(1), field), field);
    c.mul(&y_pairs(2, (l - 1) / 2, field), field)
}

/// The triple commutator `[x1,x2,x3]` with parity-generic entries.
pub fn triple_commutator(field: &FieldSpec) -> FreePolynomial {
    left_normed(&[Variable::x(1), Variable::x(2), Variable::x(3)], field).unwrap()
}

/// z1^p.
pub fn z_power_p(field: &FieldSpec) -> FreePolynomial {
    FreePolynomial::var(Variable::z(1), field).pow(field.p() as u32, field)
}

/// y1^(pq) - y1^p.
pub fn y_frobenius(field: &FieldSpec) -> FreePolynomial {
    let y = FreePolynomial::var(Variable::y(1), field);
    y.pow((field.p() * field.q()) as u32, field)
        .sub(&y.pow(field.p() as u32, field), field)
}

/// z1 z2 ... zm.
pub fn z_product(m: u32, field: &FieldSpec) -> FreePolynomial {
    let word: Vec<Variable> = (1..=m).map(Variable::z).collect();
    FreePolynomial::monomial(word, field.one())
}

/// The generating identities of T2 for the given grading, as (name, poly)
/// pairs. Families with a parameter are instantiated for every admissible
/// value; the parity-generic x in the even-k family is instantiated once
/// with a fresh y and once with a fresh z.
pub fn basis_for_grading(grading: Grading, field: &FieldSpec) -> Vec<(String, FreePolynomial)> {
    let mut out: Vec<(String, FreePolynomial)> = Vec::new();
    match grading {
        Grading::Canonical => {
            out.push((
                "[y1,y2]".into(),
                left_normed(&[Variable::y(1), Variable::y(2)], field).unwrap(),
            ));
            out.push((
                "[y1,z2]".into(),
                left_normed(&[Variable::y(1), Variable::z(2)], field).unwrap(),
            ));
            let (z1, z2) = (Variable::z(1), Variable::z(2));
            out.push((
                "z1z2+z2z1".into(),
                FreePolynomial::monomial(vec![z1, z2], field.one())
                    .add(&FreePolynomial::monomial(vec![z2, z1], field.one()), field),
            ));
            out.push(("y1^pq-y1^p".into(), y_frobenius(field)));
        }
        Grading::Infinity => {
            out.push(("[x1,x2,x3]".into(), triple_commutator(field)));
            out.push(("z1^p".into(), z_power_p(field)));
            out.push(("y1^pq-y1^p".into(), y_frobenius(field)));
        }
        Grading::KStar(k) => {
            out.push(("[x1,x2,x3]".into(), triple_commutator(field)));
            out.push((format!("z1...z{}", k + 1), z_product(k + 1, field)));
            out.push(("z1^p".into(), z_power_p(field)));
            out.push(("y1^pq-y1^p".into(), y_frobenius(field)));
        }
        Grading::K(k) => {
            if k % 2 == 1 {
                out.push((format!("h1[k={k}]"), h1(k, field)));
            } else {
                out.push((
                    format!("h2[k={k},x=y{}]", k + 2),
                    h2(k, Variable::y(k + 2), field),
                ));
                out.push((format!("h2[k={k},x=z1]"), h2(k, Variable::z(1), field)));
            }
            out.push(("[x1,x2,x3]".into(), triple_commutator(field)));
            let mut l = 0;
            while l <= k {
                out.push((format!("h3[l={l}]"), h3(k, l, field)));
                l += 2;
            }
            let mut l = 1;
            while l <= k {
                out.push((format!("h4[l={l}]"), h4(k, l, field)));
                out.push((format!("h5[l={l}]"), h5(k, l, field)));
                l += 2;
            }
            out.push(("z1^p".into(), z_power_p(field)));
            out.push(("y1^pq-y1^p".into(), y_frobenius(field)));
        }
    }
    out
}
