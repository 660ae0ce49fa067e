//! Stable identifiers for the results each verdict relies on.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Citation {
    pub id: &'static str,
    pub summary: &'static str,
}

pub const ALL: &[Citation] = &[
    Citation {
        id: "qdiv.trivial",
        summary: "a(z) = c z^m b(qz)/b(z) for some c, m, b iff div_q a = 0",
    },
    Citation {
        id: "qdiv.twisted-product",
        summary: "div_q of a(z)^k0 a(q'z)^k1 ... a(q'^r z)^kr vanishing with k0*kr != 0 forces div_q a = 0",
    },
    Citation {
        id: "rank-one.classification",
        summary: "rank one: group is GL_1 unless a is a twisted q-coboundary; then a proper subgroup, sigma_q'-constant when m = 0",
    },
    Citation {
        id: "hyper.irreducible",
        summary: "hypergeometric operator irreducible iff no a_i lies in b_j q^Z",
    },
    Citation {
        id: "hyper.kummer",
        summary: "q-Kummer induced: both parameter lists stable mod q^Z under multiplication by q^(1/d), d | n, d != 1",
    },
    Citation {
        id: "hyper.trichotomy",
        summary: "balanced rational case: derived identity component is SL_n, SO_n (n odd) or Sp_n (n even); SO/Sp iff product and pairing conditions",
    },
    Citation {
        id: "hyper.delta.balanced",
        summary: "balanced case: G^delta contains the classical group; with b_1 = q the series and its first kappa q-shifts are delta-independent",
    },
    Citation {
        id: "hyper.gl.confluent",
        summary: "n > s: alpha_i - beta_j not in Z and a connected torus give G = GL_n",
    },
    Citation {
        id: "hyper.delta.confluent",
        summary: "n > s under the GL_n hypotheses: G^delta = GL_n; with b_1 = q the series and n-1 q-shifts are delta-independent",
    },
    Citation {
        id: "hyper.sigma.balanced",
        summary: "balanced, irreducible, not Kummer induced, b_1 = q: the series is sigma_q'-independent over C_E(z)",
    },
    Citation {
        id: "hyper.sigma.confluent",
        summary: "n > s under the GL_n hypotheses with b_1 = q: the series is sigma_q'-independent over C_E(z)",
    },
    Citation {
        id: "sigma.det-criterion",
        summary: "if det A = c z^m b(qz)/b(z), any n (n-1 for SO) solution entries are sigma_q'-independent over C_E(z)",
    },
    Citation {
        id: "hyper.series",
        summary: "with b_1 = q the operator has the power series solution sum (a;q)_m/(b;q)_m lambda^m z^m",
    },
    Citation {
        id: "newton.ramification",
        summary: "slopes are rational; l is the least positive integer with every slope in Z/l",
    },
    Citation {
        id: "newton.formal-solution",
        summary: "after a twist c z^r the iterated system has a nonzero solution over C((z^(1/l)))",
    },
    Citation {
        id: "newton.iterated-system",
        summary: "A[l] = sigma_q^(l-1)(A) ... sigma_q(A) A",
    },
    Citation {
        id: "telescoper.continuous",
        summary: "projective isomonodromy: rational B with sigma(B)A = AB + delta(A) - (1/n) delta(det A) det(A)^-1 A",
    },
    Citation {
        id: "telescoper.discrete",
        summary: "sigma_q'-isomonodromy: rational B and d >= 1 with sigma_q(B)A = sigma_q'^d(A)B",
    },
    Citation {
        id: "telescoper.none-for-classical",
        summary: "SL/SO/Sp derived groups exclude a rational solution of the continuous telescoper equation",
    },
];

/// Panics on an unknown id; ids are compile-time constants of this crate.
pub fn lookup(id: &str) -> Citation {
    *ALL.iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("unknown citation id `{id}`"))
}
