"""Proof schemes and the pairing-based signature.

Two proof modes ship side by side:

``literal``
    The three-element pairing-checked proof exactly as its source
    equations prescribe, defects included.  Verification multiplies
    the setup public key into the check, so honest proofs only verify
    when the setup trapdoor equals one, and the response element is
    publicly recomputable from the first two elements, so the scheme
    has no soundness.  It exists to demonstrate this behaviour and is
    excluded from every security guarantee.

``corrected``
    A sound Fiat-Shamir sigma protocol for the same statement shape:
    an AND-composition of two discrete-log knowledge proofs, one for
    the secret key against the device public key and one for the PUF
    response scalar against the response commitment registered at
    enrollment.  Challenges bind a protocol version tag, the full
    statement, and the per-session nonce.

Signatures are the usual pairing scheme: sig = H(msg)^sk in G1 with a
two-pairing product check.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .pairing import (
    DecodeError,
    DomainTag,
    G1Element,
    G2Element,
    Scalar,
    hash_to_g1,
    hash_to_scalar,
    multi_pair,
)

MODE_LITERAL = "literal"
MODE_CORRECTED = "corrected"
MODES = (MODE_LITERAL, MODE_CORRECTED)

WIRE_TAG_LITERAL = 0x01
WIRE_TAG_CORRECTED = 0x02

NONCE_LEN = 16

# Pinned wire sizes (regression constants; see the proof-size tests).
LITERAL_PROOF_WIRE_BYTES = 1 + 3 * 48            # 145
CORRECTED_AUTH_PROOF_WIRE_BYTES = 1 + 96 + 48 + 3 * 32 + NONCE_LEN   # 257
CORRECTED_TX_PROOF_WIRE_BYTES = 1 + 96 + 2 * 32 + NONCE_LEN          # 177
SIGNATURE_WIRE_BYTES = 48

_G1 = G1Element.generator()
_G2 = G2Element.generator()


@dataclass(frozen=True)
class TrustSetup:
    """One-time setup for literal mode: trapdoor and its public key.

    Honest deployments discard the trapdoor; it is retained here so the
    defect tests can force alpha = 1.  Verifiers reconstructing the
    setup from published bytes carry ``alpha=None``.
    """

    alpha: Scalar | None
    pk_setup: G2Element
    setup_ms: float


def trust_setup(rng, forced_alpha: int | None = None) -> TrustSetup:
    """Sample the setup trapdoor and publish its G2 image.

    ``forced_alpha`` is a test hook; honest runs leave it None.  The
    wall-clock duration is recorded for the benchmark report.
    """
    t0 = time.perf_counter()
    alpha = Scalar(forced_alpha) if forced_alpha is not None else Scalar.random(rng)
    pk_setup = _G2 ** alpha
    return TrustSetup(alpha=alpha, pk_setup=pk_setup, setup_ms=(time.perf_counter() - t0) * 1000.0)


# ---------------------------------------------------------------------------
# Literal mode
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaProof:
    """The printed three-element proof: base commitment, randomness
    commitment, and the challenge response, all in G1."""

    witness_commit: G1Element
    rand_commit: G1Element
    response: G1Element

    def to_bytes(self) -> bytes:
        return (
            bytes([WIRE_TAG_LITERAL])
            + self.witness_commit.to_bytes()
            + self.rand_commit.to_bytes()
            + self.response.to_bytes()
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "SigmaProof":
        if len(data) != LITERAL_PROOF_WIRE_BYTES or data[0] != WIRE_TAG_LITERAL:
            raise DecodeError("not a literal-mode proof")
        return cls(
            witness_commit=G1Element.from_bytes(data[1:49]),
            rand_commit=G1Element.from_bytes(data[49:97]),
            response=G1Element.from_bytes(data[97:145]),
        )


def _literal_challenge(proof_witness_commit: G1Element, proof_rand_commit: G1Element) -> Scalar:
    return hash_to_scalar(
        proof_witness_commit.to_bytes() + proof_rand_commit.to_bytes(),
        DomainTag.LITERAL_CHALLENGE,
    )


def _prove_literal(base: G1Element, rng) -> SigmaProof:
    blind = Scalar.random(rng)
    witness_commit = base ** blind
    rand_commit = _G1 ** blind
    challenge = _literal_challenge(witness_commit, rand_commit)
    response = (base * (_G1 ** challenge)) ** blind
    return SigmaProof(witness_commit, rand_commit, response)


def auth_prove_literal(setup: TrustSetup, response_bytes: bytes, sk: Scalar, rng) -> SigmaProof:
    """Authentication proof over the hashed (responses || secret key)."""
    base = hash_to_g1(response_bytes + sk.to_bytes(), DomainTag.LITERAL_WITNESS_BASE)
    return _prove_literal(base, rng)


def tx_prove_literal(setup: TrustSetup, payload: bytes, rng) -> SigmaProof:
    """Transaction proof; same construction over the hashed payload."""
    base = hash_to_g1(payload, DomainTag.LITERAL_TX_BASE)
    return _prove_literal(base, rng)


def _verify_literal(setup: TrustSetup, proof: SigmaProof) -> bool:
    challenge = _literal_challenge(proof.witness_commit, proof.rand_commit)
    # e(S, g2) * e(U, pk)^h == e(V, g2), checked as a pairing product.
    check = multi_pair([
        (proof.witness_commit, _G2),
        (proof.rand_commit ** challenge, setup.pk_setup),
        (proof.response.inverse(), _G2),
    ])
    return check.is_identity()


def auth_verify_literal(setup: TrustSetup, proof: SigmaProof) -> bool:
    return _verify_literal(setup, proof)


def tx_verify_literal(setup: TrustSetup, proof: SigmaProof) -> bool:
    return _verify_literal(setup, proof)


def forge_literal_proof(rng) -> SigmaProof:
    """Build an accepting literal proof from public data only.

    The response element is recomputable from the first two elements,
    so any (S', U', S' * U'^h') triple passes whenever honest proofs
    do.  Used by the defect demonstrations.
    """
    witness_commit = _G1 ** Scalar.random(rng)
    rand_commit = _G1 ** Scalar.random(rng)
    challenge = _literal_challenge(witness_commit, rand_commit)
    response = witness_commit * rand_commit ** challenge
    return SigmaProof(witness_commit, rand_commit, response)


# ---------------------------------------------------------------------------
# Corrected mode
# ---------------------------------------------------------------------------

_CORRECTED_VERSION = b"pufzk-corrected-v1"


@dataclass(frozen=True)
class AuthStatement:
    """Public inputs an authentication proof is bound to."""

    device_id: bytes
    pk: G2Element
    response_commitment: G1Element
    challenge_epoch: int
    session_nonce: bytes

    def to_bytes(self) -> bytes:
        return b"".join([
            b"auth",
            len(self.device_id).to_bytes(2, "big"), self.device_id,
            self.pk.to_bytes(),
            self.response_commitment.to_bytes(),
            self.challenge_epoch.to_bytes(8, "big"),
            len(self.session_nonce).to_bytes(2, "big"), self.session_nonce,
        ])


@dataclass(frozen=True)
class AuthWitness:
    """Private inputs: the device secret key and the response scalar
    whose G1 image is the registered response commitment."""

    sk: Scalar
    response_scalar: Scalar


@dataclass(frozen=True)
class CorrectedAuthProof:
    commit_sk: G2Element
    commit_puf: G1Element
    challenge: Scalar
    resp_sk: Scalar
    resp_puf: Scalar
    session_nonce: bytes

    def to_bytes(self) -> bytes:
        return (
            bytes([WIRE_TAG_CORRECTED])
            + self.commit_sk.to_bytes()
            + self.commit_puf.to_bytes()
            + self.challenge.to_bytes()
            + self.resp_sk.to_bytes()
            + self.resp_puf.to_bytes()
            + self.session_nonce
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "CorrectedAuthProof":
        if len(data) != CORRECTED_AUTH_PROOF_WIRE_BYTES or data[0] != WIRE_TAG_CORRECTED:
            raise DecodeError("not a corrected-mode auth proof")
        return cls(
            commit_sk=G2Element.from_bytes(data[1:97]),
            commit_puf=G1Element.from_bytes(data[97:145]),
            challenge=Scalar.from_bytes(data[145:177]),
            resp_sk=Scalar.from_bytes(data[177:209]),
            resp_puf=Scalar.from_bytes(data[209:241]),
            session_nonce=data[241:241 + NONCE_LEN],
        )


def _corrected_auth_challenge(statement: AuthStatement, commit_sk: G2Element,
                              commit_puf: G1Element) -> Scalar:
    transcript = (
        _CORRECTED_VERSION
        + statement.to_bytes()
        + commit_sk.to_bytes()
        + commit_puf.to_bytes()
    )
    return hash_to_scalar(transcript, DomainTag.CORRECTED_CHALLENGE)


def auth_prove_corrected(statement: AuthStatement, witness: AuthWitness, rng) -> CorrectedAuthProof:
    """AND-composed knowledge proof for (sk, response scalar).

    The prover never checks witness consistency; an inconsistent
    witness yields a proof that simply fails verification.
    """
    k_sk = Scalar.random(rng)
    k_puf = Scalar.random(rng)
    commit_sk = _G2 ** k_sk
    commit_puf = _G1 ** k_puf
    challenge = _corrected_auth_challenge(statement, commit_sk, commit_puf)
    return CorrectedAuthProof(
        commit_sk=commit_sk,
        commit_puf=commit_puf,
        challenge=challenge,
        resp_sk=k_sk + challenge * witness.sk,
        resp_puf=k_puf + challenge * witness.response_scalar,
        session_nonce=statement.session_nonce,
    )


def verify_sigma_equations(statement: AuthStatement, proof: CorrectedAuthProof) -> bool:
    """The two group-equation checks alone, with the proof's own
    challenge.  This is the interactive-verifier view used by the
    honest-verifier zero-knowledge test; it deliberately skips the
    Fiat-Shamir challenge recomputation."""
    lhs_sk = _G2 ** proof.resp_sk
    rhs_sk = proof.commit_sk * statement.pk ** proof.challenge
    if lhs_sk != rhs_sk:
        return False
    lhs_puf = _G1 ** proof.resp_puf
    rhs_puf = proof.commit_puf * statement.response_commitment ** proof.challenge
    return lhs_puf == rhs_puf


def auth_verify_corrected(statement: AuthStatement, proof: CorrectedAuthProof) -> bool:
    """Full non-interactive verification: nonce binding, challenge
    recomputation, and both sigma equations."""
    if proof.session_nonce != statement.session_nonce:
        return False
    if proof.challenge != _corrected_auth_challenge(statement, proof.commit_sk, proof.commit_puf):
        return False
    return verify_sigma_equations(statement, proof)


def simulate_auth_transcript(statement: AuthStatement, rng) -> CorrectedAuthProof:
    """Honest-verifier zero-knowledge simulator.

    Produces a transcript distributed like an honest one without any
    witness: sample the challenge and responses, then solve for the
    commitments.  It satisfies ``verify_sigma_equations`` but not the
    Fiat-Shamir binding, so ``auth_verify_corrected`` rejects it.
    """
    challenge = Scalar.random(rng)
    resp_sk = Scalar.random(rng)
    resp_puf = Scalar.random(rng)
    commit_sk = (_G2 ** resp_sk) * (statement.pk ** challenge).inverse()
    commit_puf = (_G1 ** resp_puf) * (statement.response_commitment ** challenge).inverse()
    return CorrectedAuthProof(
        commit_sk=commit_sk,
        commit_puf=commit_puf,
        challenge=challenge,
        resp_sk=resp_sk,
        resp_puf=resp_puf,
        session_nonce=statement.session_nonce,
    )


@dataclass(frozen=True)
class TxStatement:
    """Public inputs a corrected-mode transaction proof is bound to."""

    device_id: bytes
    pk: G2Element
    payload_digest: bytes
    tx_nonce: bytes

    def to_bytes(self) -> bytes:
        return b"".join([
            b"tx",
            len(self.device_id).to_bytes(2, "big"), self.device_id,
            self.pk.to_bytes(),
            len(self.payload_digest).to_bytes(2, "big"), self.payload_digest,
            len(self.tx_nonce).to_bytes(2, "big"), self.tx_nonce,
        ])


@dataclass(frozen=True)
class CorrectedTxProof:
    commit_sk: G2Element
    challenge: Scalar
    resp_sk: Scalar
    tx_nonce: bytes

    def to_bytes(self) -> bytes:
        return (
            bytes([WIRE_TAG_CORRECTED])
            + self.commit_sk.to_bytes()
            + self.challenge.to_bytes()
            + self.resp_sk.to_bytes()
            + self.tx_nonce
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "CorrectedTxProof":
        if len(data) != CORRECTED_TX_PROOF_WIRE_BYTES or data[0] != WIRE_TAG_CORRECTED:
            raise DecodeError("not a corrected-mode tx proof")
        return cls(
            commit_sk=G2Element.from_bytes(data[1:97]),
            challenge=Scalar.from_bytes(data[97:129]),
            resp_sk=Scalar.from_bytes(data[129:161]),
            tx_nonce=data[161:161 + NONCE_LEN],
        )


def _corrected_tx_challenge(statement: TxStatement, commit_sk: G2Element) -> Scalar:
    return hash_to_scalar(
        _CORRECTED_VERSION + statement.to_bytes() + commit_sk.to_bytes(),
        DomainTag.CORRECTED_CHALLENGE,
    )


def tx_prove_corrected(statement: TxStatement, sk: Scalar, rng) -> CorrectedTxProof:
    """Knowledge-of-sk proof bound to the payload digest and nonce; a
    signature of knowledge playing the printed transaction proof's role
    in corrected mode."""
    k = Scalar.random(rng)
    commit_sk = _G2 ** k
    challenge = _corrected_tx_challenge(statement, commit_sk)
    return CorrectedTxProof(
        commit_sk=commit_sk,
        challenge=challenge,
        resp_sk=k + challenge * sk,
        tx_nonce=statement.tx_nonce,
    )


def tx_verify_corrected(statement: TxStatement, proof: CorrectedTxProof) -> bool:
    if proof.tx_nonce != statement.tx_nonce:
        return False
    if proof.challenge != _corrected_tx_challenge(statement, proof.commit_sk):
        return False
    return _G2 ** proof.resp_sk == proof.commit_sk * statement.pk ** proof.challenge


# ---------------------------------------------------------------------------
# Pairing-based signatures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    sig: G1Element

    def to_bytes(self) -> bytes:
        return self.sig.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Signature":
        if len(data) != SIGNATURE_WIRE_BYTES:
            raise DecodeError("bad signature length")
        return cls(sig=G1Element.from_bytes(data))


def sign(sk: Scalar, message: bytes) -> Signature:
    return Signature(sig=hash_to_g1(message, DomainTag.SIGNATURE_MESSAGE) ** sk)


def verify_sig(pk: G2Element, message: bytes, signature: Signature) -> bool:
    """Check e(sig, g2) == e(H(msg), pk) via one pairing product."""
    check = multi_pair([
        (signature.sig.inverse(), _G2),
        (hash_to_g1(message, DomainTag.SIGNATURE_MESSAGE), pk),
    ])
    return check.is_identity()


def parse_proof(data: bytes):
    """Decode a mode-tagged proof wire blob to the right proof type."""
    if not data:
        raise DecodeError("empty proof")
    if data[0] == WIRE_TAG_LITERAL:
        return SigmaProof.from_bytes(data)
    if data[0] == WIRE_TAG_CORRECTED:
        if len(data) == CORRECTED_AUTH_PROOF_WIRE_BYTES:
            return CorrectedAuthProof.from_bytes(data)
        if len(data) == CORRECTED_TX_PROOF_WIRE_BYTES:
            return CorrectedTxProof.from_bytes(data)
        raise DecodeError("bad corrected-mode proof length")
    raise DecodeError(f"unknown proof mode tag 0x{data[0]:02x}")
