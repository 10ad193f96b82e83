//! Reference coefficients for the two-site polynomial ansatz, as rational
//! expressions in q. Index (i, j, k) is the exponent triple in slot order.

/// H coefficients of the IK model, normalized by the constant term.
pub const IK_H: [([u8; 3], &str); 32] = [
    ([0, 0, 0], "1"),
    ([0, 0, 1], "-((2*(2*q^4-2*q-1))/(q^2*(q^2+1)*(q^2+q+1)))"),
    (
        [0, 0, 2],
        "((q^7+q^5-8*q^4-3*q^3+q^2+q+1)/(q^5*(q^2+1)*(q^2+q+1)))",
    ),
    ([0, 0, 3], "((2*(q^4-q-1))/(q^5*(q^2+1)*(q^2+q+1)))"),
    (
        [1, 0, 0],
        "-((2*(q^4-2*q^3-2*q+1))/((q-1)*q*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [1, 0, 1],
        "-((q^10-4*q^8+5*q^7-q^6+17*q^5-13*q^4-3*q^3+q+1)/(q^5*(q^5+q^3-q^2-1)))",
    ),
    (
        [1, 0, 2],
        "-((2*(q^7-8*q^6+7*q^5+q^4+5*q^3-2*q^2-3*q+1))/(q^6*(q^5+q^3-q^2-1)))",
    ),
    (
        [1, 0, 3],
        "-((q^8-4*q^7+2*q^6-8*q^5+2*q^4+4*q^3-1)/(q^8*(q^5+q^3-q^2-1)))",
    ),
    ([2, 0, 0], "-((q^4+q^3+6*q^2+q+1)/(q^3*(q^2+1)*(q^2+q+1)))"),
    ([2, 0, 1], "((2*(6*q^4-q^3-3*q-1))/(q^5*(q^2+1)*(q^2+q+1)))"),
    (
        [2, 0, 2],
        "-((5*q^7-4*q^6+q^5-12*q^4-3*q^3+q^2+q+1)/(q^8*(q^2+1)*(q^2+q+1)))",
    ),
    ([2, 0, 3], "-((2*(q^6+2*q^4-q-1))/(q^8*(q^2+1)*(q^2+q+1)))"),
    ([3, 0, 0], "((2)/(q^3-q^6))"),
    ([3, 0, 1], "((4*q^3-q^2-1)/(q^6*(q^3-1)))"),
    ([3, 0, 2], "-((2*(q^3-q^2-1))/(q^6*(q^3-1)))"),
    ([3, 0, 3], "-((q^2+1)/(q^6*(q^3-1)))"),
    ([0, 1, 0], "-((2)/(q^2+1))"),
    (
        [0, 1, 1],
        "((q^7+q^6+5*q^5-3*q^4-4*q^3-3*q^2+1)/(q^5*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [0, 1, 2],
        "-((2*(q^5-q^4-q^3-4*q^2+2))/(q^5*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [0, 1, 3],
        "-((3*q^4-q^3-2*q^2-q-1)/(q^7*(q^2+1)*(q^2+q+1)))",
    ),
    ([1, 1, 0], "((q^6+q^4-8*q^3+q^2+1)/(q^3*(q^5+q^3-q^2-1)))"),
    (
        [1, 1, 1],
        "-((2*(2*q^6-7*q^5+q^4-4*q^3+8*q^2+q-3))/(q^5*(q^5+q^3-q^2-1)))",
    ),
    (
        [1, 1, 2],
        "((q^11-5*q^10+2*q^9-12*q^8+22*q^7+q^6-3*q^4-5*q^3+4*q^2-1)/(q^10*(q^5+q^3-q^2-1)))",
    ),
    (
        [1, 1, 3],
        "((2*(q^6-4*q^5+q^4-2*q^3+q^2+2*q-1))/(q^8*(q^5+q^3-q^2-1)))",
    ),
    ([2, 1, 0], "((2*(2*q^2+q+2))/(q^3*(q^2+1)*(q^2+q+1)))"),
    (
        [2, 1, 1],
        "-((5*q^7+q^6+9*q^5-7*q^4-4*q^3-3*q^2+1)/(q^8*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [2, 1, 2],
        "((2*(q^7+2*q^5-5*q^4-q^3-4*q^2+2))/(q^8*(q^2+1)*(q^2+q+1)))",
    ),
    ([2, 1, 3], "((4*q^4-q^2-q-1)/(q^10*(q^2+q+1)))"),
    ([3, 1, 0], "((q^2+1)/(q^5*(q^3-1)))"),
    ([3, 1, 1], "-((2*(q^3+q-1))/(q^6*(q^3-1)))"),
    ([3, 1, 2], "((q^3+q-4)/(q^6*(q^3-1)))"),
    ([3, 1, 3], "((2)/(q^6*(q^3-1)))"),
];

/// H̄ coefficients of the IK model, normalized by the constant term of H.
pub const IK_HBAR: [([u8; 3], &str); 32] = [
    ([0, 0, 0], "q^4"),
    (
        [0, 0, 1],
        "-((2*q^3*(q^4-2*q^3-2*q+1))/((q-1)*(q^2+1)*(q^2+q+1)))",
    ),
    ([0, 0, 2], "-((q*(q^4+q^3+6*q^2+q+1))/((q^2+1)*(q^2+q+1)))"),
    ([0, 0, 3], "-((2*q)/((q-1)*(q^2+q+1)))"),
    ([1, 0, 0], "-((2*q^3*(q^4+2*q^3-2))/((q^2+1)*(q^2+q+1)))"),
    (
        [1, 0, 1],
        "((q^10+q^9-3*q^7-13*q^6+17*q^5-q^4+5*q^3-4*q^2+1)/((q-1)*q^2*(q^2+1)*(q^2+q+1)))",
    ),
    ([1, 0, 2], "((2*(q^4+3*q^3+q-6))/((q^2+1)*(q^2+q+1)))"),
    ([1, 0, 3], "((q^3+q-4)/((q-1)*q^2*(q^2+q+1)))"),
    (
        [2, 0, 0],
        "((q^7+q^6+q^5-3*q^4-8*q^3+q^2+1)/((q^2+1)*(q^2+q+1)))",
    ),
    (
        [2, 0, 1],
        "-((2*(q^7-3*q^6-2*q^5+5*q^4+q^3+7*q^2-8*q+1))/((q-1)*q*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [2, 0, 2],
        "-((q^7+q^6+q^5-3*q^4-12*q^3+q^2-4*q+5)/(q^3*(q^2+1)*(q^2+q+1)))",
    ),
    ([2, 0, 3], "((2*(q^3+q-1))/((q-1)*q^5*(q^2+q+1)))"),
    ([3, 0, 0], "((2*(q^4+q^3-1))/((q^2+1)*(q^2+q+1)))"),
    (
        [3, 0, 1],
        "-((q^8-4*q^5-2*q^4+8*q^3-2*q^2+4*q-1)/((q-1)*q^3*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [3, 0, 2],
        "-((2*(q^6+q^5-2*q^2-1))/(q^5*(q^2+1)*(q^2+q+1)))",
    ),
    ([3, 0, 3], "((q^2+1)/((q-1)*q^7*(q^2+q+1)))"),
    ([0, 1, 0], "((2*q^3)/(q^2+1))"),
    (
        [0, 1, 1],
        "-((q^6+q^4-8*q^3+q^2+1)/((q-1)*(q^2+1)*(q^2+q+1)))",
    ),
    ([0, 1, 2], "-((2*(2*q^2+q+2))/((q^2+1)*(q^2+q+1)))"),
    ([0, 1, 3], "-((q^2+1)/((q-1)*q^2*(q^2+q+1)))"),
    (
        [1, 1, 0],
        "((q^7-3*q^5-4*q^4-3*q^3+5*q^2+q+1)/((q^2+1)*(q^2+q+1)))",
    ),
    (
        [1, 1, 1],
        "((2*(3*q^6-q^5-8*q^4+4*q^3-q^2+7*q-2))/((q-1)*q*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [1, 1, 2],
        "-((q^7-3*q^5-4*q^4-7*q^3+9*q^2+q+5)/(q^3*(q^2+1)*(q^2+q+1)))",
    ),
    ([1, 1, 3], "((2*(q^3-q^2-1))/((q-1)*q^5*(q^2+q+1)))"),
    (
        [2, 1, 0],
        "((2*(2*q^5-4*q^3-q^2-q+1))/(q*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [2, 1, 1],
        "((q^11-4*q^9+5*q^8+3*q^7-q^5-22*q^4+12*q^3-2*q^2+5*q-1)/((q-1)*q^4*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [2, 1, 2],
        "-((2*(2*q^7-4*q^5-q^4-5*q^3+2*q^2+1))/(q^6*(q^2+1)*(q^2+q+1)))",
    ),
    ([2, 1, 3], "((4*q^3-q^2-1)/((q-1)*q^8*(q^2+q+1)))"),
    ([3, 1, 0], "((q^4+q^3+2*q^2+q-3)/(q*(q^2+1)*(q^2+q+1)))"),
    (
        [3, 1, 1],
        "-((2*(q^6-2*q^5-q^4+2*q^3-q^2+4*q-1))/((q-1)*q^4*(q^2+1)*(q^2+q+1)))",
    ),
    ([3, 1, 2], "-((q^4+q^3+q^2-4)/(q^6*(q^2+q+1)))"),
    ([3, 1, 3], "((2)/((q-1)*q^8*(q^2+q+1)))"),
];

/// H coefficients of the FZ model, normalized by the constant term.
pub const FZ_H: [([u8; 3], &str); 32] = [
    ([0, 0, 0], "1"),
    ([0, 0, 1], "-((2*(q+2))/(q^2+1))"),
    ([0, 0, 2], "(((2*q+1)*(q^2+4*q+1))/(q*(q^2+1)*(q^2+q+1)))"),
    ([0, 0, 3], "-((2)/(q*(q^2+1)))"),
    ([1, 0, 0], "-((2*(q+1))/(q^2+1))"),
    (
        [1, 0, 1],
        "-(((q+1)*(q^4-q^3-8*q^2-9*q-1))/(q*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [1, 0, 2],
        "((2*(q+1)*(q^3-2*q^2-5*q-3))/(q*(q^2+1)*(q^2+q+1)))",
    ),
    ([1, 0, 3], "(((q+1)*(q^2+4*q+1))/(q^2*(q^2+1)*(q^2+q+1)))"),
    ([2, 0, 0], "((q^2+4*q+1)/((q^2+1)*(q^2+q+1)))"),
    (
        [2, 0, 1],
        "((2*(q^4-q^3-5*q^2-3*q-1))/(q*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [2, 0, 2],
        "-((q^5-4*q^3-9*q^2-5*q-1)/(q^2*(q^2+1)*(q^2+q+1)))",
    ),
    ([2, 0, 3], "-((2)/(q^2*(q^2+1)))"),
    ([3, 0, 0], "0"),
    ([3, 0, 1], "0"),
    ([3, 0, 2], "0"),
    ([3, 0, 3], "0"),
    ([0, 1, 0], "-((2)/(q^2+1))"),
    (
        [0, 1, 1],
        "((q^5+5*q^4+9*q^3+4*q^2-1)/(q^3*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [0, 1, 2],
        "-((2*(q^4+3*q^3+5*q^2+q-1))/(q^3*(q^2+1)*(q^2+q+1)))",
    ),
    ([0, 1, 3], "((q^2+4*q+1)/(q^2*(q^2+1)*(q^2+q+1)))"),
    ([1, 1, 0], "(((q+1)*(q^2+4*q+1))/(q*(q^2+1)*(q^2+q+1)))"),
    (
        [1, 1, 1],
        "-((2*(q+1)*(3*q^3+5*q^2+2*q-1))/(q^3*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [1, 1, 2],
        "(((q+1)*(q^4+9*q^3+8*q^2+q-1))/(q^4*(q^2+1)*(q^2+q+1)))",
    ),
    ([1, 1, 3], "-((2*(q+1))/(q^3*(q^2+1)))"),
    ([2, 1, 0], "-((2)/(q*(q^2+1)))"),
    ([2, 1, 1], "(((q+2)*(q^2+4*q+1))/(q^2*(q^2+1)*(q^2+q+1)))"),
    ([2, 1, 2], "-((2*(2*q+1))/(q^3*(q^2+1)))"),
    ([2, 1, 3], "((1)/(q^4))"),
    ([3, 1, 0], "0"),
    ([3, 1, 1], "0"),
    ([3, 1, 2], "0"),
    ([3, 1, 3], "0"),
];

/// H̄ coefficients of the FZ model, normalized by the constant term of H.
pub const FZ_HBAR: [([u8; 3], &str); 32] = [
    ([0, 0, 0], "1"),
    ([0, 0, 1], "-((2*(q+1))/(q^2+1))"),
    ([0, 0, 2], "((q^2+4*q+1)/(q^4+q^3+2*q^2+q+1))"),
    ([0, 0, 3], "0"),
    ([1, 0, 0], "-((4*q+2)/(q^2+1))"),
    (
        [1, 0, 1],
        "(((q+1)*(q^4+9*q^3+8*q^2+q-1))/(q^2*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [1, 0, 2],
        "-((2*(q^4+3*q^3+5*q^2+q-1))/(q^2*(q^2+1)*(q^2+q+1)))",
    ),
    ([1, 0, 3], "0"),
    ([2, 0, 0], "(((q+2)*(q^2+4*q+1))/((q^2+1)*(q^2+q+1)))"),
    (
        [2, 0, 1],
        "-((2*(q+1)*(3*q^3+5*q^2+2*q-1))/(q^2*(q^2+1)*(q^2+q+1)))",
    ),
    (
        [2, 0, 2],
        "((q^5+5*q^4+9*q^3+4*q^2-1)/(q^3*(q^2+1)*(q^2+q+1)))",
    ),
    ([2, 0, 3], "0"),
    ([3, 0, 0], "-((2)/(q^2+1))"),
    ([3, 0, 1], "((q^3+5*q^2+5*q+1)/(q^5+q^4+2*q^3+q^2+q))"),
    ([3, 0, 2], "-((2)/(q^3+q))"),
    ([3, 0, 3], "0"),
    ([0, 1, 0], "-((2*q)/(q^2+1))"),
    ([0, 1, 1], "(((q+1)*(q^2+4*q+1))/((q^2+1)*(q^2+q+1)))"),
    ([0, 1, 2], "-((2)/(q^2+1))"),
    ([0, 1, 3], "0"),
    ([1, 1, 0], "((-q^5+4*q^3+9*q^2+5*q+1)/(q^4+q^3+2*q^2+q+1))"),
    (
        [1, 1, 1],
        "((2*(q+1)*(q^3-2*q^2-5*q-3))/((q^2+1)*(q^2+q+1)))",
    ),
    ([1, 1, 2], "((2*q^3+9*q^2+6*q+1)/(q^5+q^4+2*q^3+q^2+q))"),
    ([1, 1, 3], "0"),
    ([2, 1, 0], "((2*(q^4-q^3-5*q^2-3*q-1))/((q^2+1)*(q^2+q+1)))"),
    (
        [2, 1, 1],
        "((-q^5+9*q^3+17*q^2+10*q+1)/(q^5+q^4+2*q^3+q^2+q))",
    ),
    ([2, 1, 2], "-((2*(q+2))/(q^3+q))"),
    ([2, 1, 3], "0"),
    ([3, 1, 0], "((q^2+4*q+1)/(q^4+q^3+2*q^2+q+1))"),
    ([3, 1, 1], "-((2*(q+1))/(q^3+q))"),
    ([3, 1, 2], "((1)/(q^2))"),
    ([3, 1, 3], "0"),
];
