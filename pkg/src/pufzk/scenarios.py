"""Adversary suite, demo walkthrough, and transcript audit.

These are the scenario drivers behind the CLI: the attack suite runs
every adversary script at volume and summarises defence rates; the demo
produces a deterministic end-to-end transcript file; the audit replays
a transcript, re-executes the embedded ledger log, and re-verifies the
recorded proofs.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import zkp
from .identity import CertificateAuthority
from .ledger import Ledger, bootstrap, ledger_new
from .pairing import G1Element, G2Element
from .params import DEFAULT_PARAMS, ParamSet
from .protocol import (
    AttackOutcome,
    Device,
    Verifier,
    attack_clone_device,
    attack_impersonate,
    attack_mitm_bitflip,
    attack_replay,
    attack_swap_proofs,
    attack_tamper_payload,
    run_authentication,
    run_transaction,
)
from .puf import puf_new
from .wire import AuthRequest, TAG_AUTH_REQUEST, decode_message

SUITE_NAMES = ("replay", "impersonate", "mitm", "tamper", "literal-defects")


@dataclass
class AttackSuiteReport:
    """Defence rates per adversary scenario plus the literal-mode
    defect demonstrations."""

    seed: int
    outcomes: List[AttackOutcome] = field(default_factory=list)
    literal_defects: Dict[str, bool] = field(default_factory=dict)

    @property
    def all_defended(self) -> bool:
        return all(o.defended for o in self.outcomes)

    @property
    def all_defects_reproduced(self) -> bool:
        return all(self.literal_defects.values()) if self.literal_defects else True

    def passed(self) -> bool:
        return self.all_defended and self.all_defects_reproduced

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "outcomes": [dataclasses.asdict(o) for o in self.outcomes],
            "literal_defects_reproduced": self.literal_defects,
            "all_defended": self.all_defended,
            "passed": self.passed(),
        }

    def to_text(self) -> str:
        lines = ["adversary suite results", f"  seed={self.seed}", ""]
        lines.append(f"  {'scenario':<26}{'attempts':>10}{'accepted':>10}  verdict")
        for o in self.outcomes:
            verdict = "DEFENDED" if o.defended else "BREACHED"
            lines.append(f"  {o.name:<26}{o.attempts:>10}{o.accepted:>10}  {verdict}")
        if self.literal_defects:
            lines.append("")
            lines.append("  literal-mode defect demonstrations:")
            for name, reproduced in self.literal_defects.items():
                lines.append(f"    {name}: {'reproduced' if reproduced else 'NOT REPRODUCED'}")
        lines.append("")
        lines.append(f"  overall: {'PASS' if self.passed() else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _perturb_proof_fields(device: Device, verifier: Verifier, ledger: Ledger, rng,
                          np_rng, rounds: int) -> AttackOutcome:
    """Target each proof field in turn: honest request intercepted in
    flight, one field perturbed, delivered.  All must be rejected."""
    fields = ("commit_sk", "commit_puf", "challenge", "resp_sk", "resp_puf", "session_nonce")
    accepted = 0
    attempts = 0
    for i in range(rounds):
        target = fields[i % len(fields)]

        def mutate(raw: bytes, target=target) -> bytes:
            msg = decode_message(raw)
            proof = zkp.CorrectedAuthProof.from_bytes(msg.proof)
            if target == "commit_sk":
                proof = dataclasses.replace(proof, commit_sk=proof.commit_sk * G2Element.generator())
            elif target == "commit_puf":
                proof = dataclasses.replace(proof, commit_puf=proof.commit_puf * G1Element.generator())
            elif target == "challenge":
                proof = dataclasses.replace(proof, challenge=proof.challenge + 1)
            elif target == "resp_sk":
                proof = dataclasses.replace(proof, resp_sk=proof.resp_sk + 1)
            elif target == "resp_puf":
                proof = dataclasses.replace(proof, resp_puf=proof.resp_puf + 1)
            else:
                flipped = bytes([proof.session_nonce[0] ^ 1]) + proof.session_nonce[1:]
                proof = dataclasses.replace(proof, session_nonce=flipped)
            return AuthRequest(msg.device_id, proof.to_bytes(), msg.nonce).to_bytes()

        session = run_authentication(
            device, verifier, ledger, zkp.MODE_CORRECTED, rng, np_rng, tamper=mutate,
        )
        attempts += 1
        accepted += int(session.accepted)
    return AttackOutcome("perturb-proof-fields", attempts, accepted)


def _simulator_replay(device: Device, verifier: Verifier, ledger: Ledger, rng,
                      trials: int) -> AttackOutcome:
    """Simulator transcripts (valid sigma equations, no witness) pushed
    through the real verifier under fresh nonces."""
    record = ledger.query_device_record(device.device_id)
    pk = G2Element.from_bytes(record.pk_bytes)
    commitment = G1Element.from_bytes(record.commitment_bytes)
    accepted = 0
    for _ in range(trials):
        session = verifier.begin_session(device.device_id)
        statement = zkp.AuthStatement(
            device_id=device.device_id,
            pk=pk,
            response_commitment=commitment,
            challenge_epoch=session.epoch,
            session_nonce=session.nonce,
        )
        simulated = zkp.simulate_auth_transcript(statement, rng)
        raw = AuthRequest(device.device_id, simulated.to_bytes(), session.nonce).to_bytes()
        decision = verifier.handle_auth_request(raw, zkp.MODE_CORRECTED)
        accepted += int(decision.accept)
    return AttackOutcome("simulator-replay", trials, accepted)


def _literal_defect_demos(rng, np_rng, ca: CertificateAuthority,
                          params: ParamSet) -> Dict[str, bool]:
    """The three printed-scheme behaviours, demonstrated end to end."""
    results = {}
    # alpha = 1: honest proofs accepted, public forgeries accepted too
    setup_one = zkp.trust_setup(rng, forced_alpha=1)
    ledger_one = ledger_new()
    bootstrap(ledger_one, setup_one.pk_setup, ca.pk)
    verifier_one = Verifier(ledger_one, rng)
    device = Device.enroll(puf_new(rng.getrandbits(32), 0.0), ca, ledger_one, rng, np_rng, params)
    honest = run_authentication(device, verifier_one, ledger_one, zkp.MODE_LITERAL,
                                rng, np_rng, setup=setup_one)
    results["honest-accepted-at-alpha-1"] = bool(honest.accepted)

    forged = zkp.forge_literal_proof(rng)
    raw = AuthRequest(device.device_id, forged.to_bytes(), b"\x00" * 16).to_bytes()
    decision = verifier_one.handle_auth_request(raw, zkp.MODE_LITERAL)
    results["public-forgery-accepted-at-alpha-1"] = bool(decision.accept)

    replayed = attack_replay(honest, verifier_one, ledger_one, mode=zkp.MODE_LITERAL)
    results["replay-accepted"] = not replayed.defended

    # random alpha: honest proofs rejected (completeness defect)
    setup_rand = zkp.trust_setup(rng)
    ledger_rand = ledger_new()
    bootstrap(ledger_rand, setup_rand.pk_setup, ca.pk)
    verifier_rand = Verifier(ledger_rand, rng)
    device_rand = Device.enroll(puf_new(rng.getrandbits(32), 0.0), ca, ledger_rand,
                                rng, np_rng, params)
    honest_rand = run_authentication(device_rand, verifier_rand, ledger_rand,
                                     zkp.MODE_LITERAL, rng, np_rng, setup=setup_rand)
    results["honest-rejected-at-random-alpha"] = not honest_rand.accepted
    return results


def run_attack_suite(seed: int = 0, params: ParamSet = DEFAULT_PARAMS,
                     suites: Optional[Tuple[str, ...]] = None,
                     scale: float = 1.0) -> AttackSuiteReport:
    """Run the adversary scripts and the literal-defect demonstrations.

    ``suites`` selects scenario groups (default: all); ``scale`` shrinks
    trial counts for quick runs while keeping every scenario exercised.
    """
    if suites is None:
        suites = SUITE_NAMES
    unknown = set(suites) - set(SUITE_NAMES)
    if unknown:
        raise ValueError(f"unknown suite selection: {sorted(unknown)}")

    def n(count: int) -> int:
        return max(1, int(count * scale))

    rng = random.Random(seed)
    np_rng = np.random.default_rng(seed)
    ca = CertificateAuthority(rng)
    setup = zkp.trust_setup(rng)
    ledger = ledger_new()
    bootstrap(ledger, setup.pk_setup, ca.pk)
    verifier = Verifier(ledger, rng)
    params = dataclasses.replace(params, noise_ratio=0.0)
    device = Device.enroll(puf_new(101, 0.0), ca, ledger, rng, np_rng, params)
    device_b = Device.enroll(puf_new(102, 0.0), ca, ledger, rng, np_rng, params)

    report = AttackSuiteReport(seed=seed)

    if "replay" in suites:
        replays = n(100)
        accepted = 0
        detail = ""
        for _ in range(replays):
            honest = run_authentication(device, verifier, ledger, zkp.MODE_CORRECTED, rng, np_rng)
            if not honest.accepted:
                raise RuntimeError("honest session failed during suite setup")
            outcome = attack_replay(honest, verifier, ledger)
            accepted += outcome.accepted
            detail = outcome.detail
        report.outcomes.append(AttackOutcome("replay", replays, accepted, detail))
        honest = run_authentication(device, verifier, ledger, zkp.MODE_CORRECTED, rng, np_rng)
        forged = attack_replay(honest, verifier, ledger, forge_current_nonce=True)
        report.outcomes.append(AttackOutcome("replay-forged-nonce", 1, forged.accepted, forged.detail))

    if "impersonate" in suites:
        report.outcomes.append(
            attack_impersonate(device.device_id, ledger, verifier, rng, trials=n(400)))
        report.outcomes.append(
            attack_impersonate(device.device_id, ledger, verifier, rng, trials=n(100),
                               leaked_sk=device.keypair.sk))
        clone_accepted = 0
        clones = n(100)
        for i in range(clones):
            outcome = attack_clone_device(device.device_id, ledger, verifier, rng,
                                          clone_seed=7_000_000 + i, params=params)
            clone_accepted += outcome.accepted
        report.outcomes.append(AttackOutcome("clone-device", clones, clone_accepted))
        report.outcomes.append(_simulator_replay(device, verifier, ledger, rng, n(100)))

    if "mitm" in suites:
        report.outcomes.append(
            attack_mitm_bitflip(device, verifier, ledger, zkp.MODE_CORRECTED, rng,
                                np_rng, flips=n(100)))
        report.outcomes.append(attack_swap_proofs(device, device_b, verifier, ledger, rng, np_rng))
        report.outcomes.append(
            _perturb_proof_fields(device, verifier, ledger, rng, np_rng, rounds=n(60)))
        control = run_authentication(device, verifier, ledger, zkp.MODE_CORRECTED, rng, np_rng)
        report.outcomes.append(AttackOutcome(
            "pass-through-control", 1, 0 if control.accepted else 1,
            "honest session must still succeed"))

    if "tamper" in suites:
        auth = run_authentication(device, verifier, ledger, zkp.MODE_CORRECTED, rng, np_rng)
        if not auth.accepted:
            raise RuntimeError("honest session failed during suite setup")
        report.outcomes.append(attack_tamper_payload(device, verifier, ledger, rng, trials=n(100)))

    if "literal-defects" in suites:
        report.literal_defects = _literal_defect_demos(rng, np_rng, ca, params)

    return report


# ---------------------------------------------------------------------------
# Demo and audit
# ---------------------------------------------------------------------------

_TRANSCRIPT_HEADER = "pufzk-transcript v1"


def run_demo(seed: int = 0, params: ParamSet = DEFAULT_PARAMS) -> Tuple[str, Dict]:
    """Deterministic walkthrough: enrollment, authentication, a
    committed transaction, a rejected replay, and chain verification.

    Returns (transcript text, summary dict).  Identical seeds produce
    byte-identical transcripts.
    """
    rng = random.Random(seed)
    np_rng = np.random.default_rng(seed)
    ca = CertificateAuthority(rng)
    setup = zkp.trust_setup(rng)
    ledger = ledger_new()
    bootstrap(ledger, setup.pk_setup, ca.pk)
    verifier = Verifier(ledger, rng)

    device_a = Device.enroll(puf_new(seed * 7 + 1, params.noise_ratio), ca, ledger, rng, np_rng, params)
    device_b = Device.enroll(puf_new(seed * 7 + 2, params.noise_ratio), ca, ledger, rng, np_rng, params)

    sessions = []
    auth_a = run_authentication(device_a, verifier, ledger, zkp.MODE_CORRECTED, rng, np_rng)
    sessions.append(auth_a)
    tx_a = run_transaction(device_a, verifier, ledger, b"demo-reading-1", zkp.MODE_CORRECTED, rng)
    sessions.append(tx_a)
    replay_session = verifier.begin_session(device_a.device_id)
    replay_raw = auth_a.auth_request_bytes()
    replay_decision = verifier.handle_auth_request(replay_raw, zkp.MODE_CORRECTED)
    replay_session.record(replay_raw)
    replay_session.record(replay_decision.to_bytes())
    replay_session.accepted = replay_decision.accept
    replay_session.reason = replay_decision.reason
    sessions.append(replay_session)
    auth_b = run_authentication(device_b, verifier, ledger, zkp.MODE_CORRECTED, rng, np_rng)
    sessions.append(auth_b)

    chain_ok = ledger.verify_chain()

    lines = [_TRANSCRIPT_HEADER]
    meta = {"seed": seed, "mode": zkp.MODE_CORRECTED, "params": params.name}
    lines.append("meta " + json.dumps(meta, sort_keys=True).encode().hex())
    lines.append("ledger " + ledger.export_log().hex())
    lines.append("state " + ledger.state_digest().hex())
    lines.append("head " + ledger.head_digest().hex())
    for device in (device_a, device_b):
        lines.append("identity " + device.identity.export().hex())
    for session in sessions:
        header = (
            session.session_id
            + len(session.device_id).to_bytes(2, "big") + session.device_id
            + len(session.nonce).to_bytes(2, "big") + session.nonce
            + (session.epoch & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "big")
        )
        lines.append("session " + header.hex())
        for raw in session.transcript:
            lines.append("msg " + raw.hex())
        outcome = bytes([1 if session.accepted else 0]) + session.reason.encode()
        lines.append("outcome " + outcome.hex())
    lines.append("chain " + (b"\x01" if chain_ok else b"\x00").hex())
    transcript = "\n".join(lines) + "\n"

    summary = {
        "devices": [device_a.device_id.hex(), device_b.device_id.hex()],
        "sessions": len(sessions),
        "accepted": [bool(s.accepted) for s in sessions],
        "replay_rejected": not replay_decision.accept,
        "chain_ok": chain_ok,
        "ledger_height": ledger.height,
        "state_digest": ledger.state_digest().hex(),
    }
    return transcript, summary


def audit_transcript(text: str) -> Tuple[bool, List[str]]:
    """Replay a demo transcript: re-execute the ledger log, re-verify
    the chain and digests, and re-check every accepted proof."""
    findings: List[str] = []
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _TRANSCRIPT_HEADER:
        return False, ["not a transcript file"]

    entries = []
    for ln in lines[1:]:
        kind, _, payload = ln.partition(" ")
        try:
            entries.append((kind, bytes.fromhex(payload)))
        except ValueError:
            return False, [f"bad hex on a {kind!r} line"]

    ledger_blob = state_digest = head_digest = None
    sessions: List[Dict] = []
    identities: List[bytes] = []
    current: Optional[Dict] = None
    chain_flag = None
    for kind, payload in entries:
        if kind == "ledger":
            ledger_blob = payload
        elif kind == "state":
            state_digest = payload
        elif kind == "head":
            head_digest = payload
        elif kind == "identity":
            identities.append(payload)
        elif kind == "session":
            current = {"header": payload, "msgs": [], "outcome": None}
            sessions.append(current)
        elif kind == "msg" and current is not None:
            current["msgs"].append(payload)
        elif kind == "outcome" and current is not None:
            current["outcome"] = payload
        elif kind == "chain":
            chain_flag = payload
        elif kind == "meta":
            pass
        else:
            findings.append(f"unexpected line kind {kind!r}")

    if ledger_blob is None:
        return False, ["transcript carries no ledger log"]
    try:
        ledger = Ledger.replay_log(ledger_blob)
    except Exception as exc:
        return False, [f"ledger replay failed: {exc}"]
    if not ledger.verify_chain():
        findings.append("replayed chain failed verification")
    if state_digest is not None and ledger.state_digest() != state_digest:
        findings.append("replayed state digest differs from recorded digest")
    if head_digest is not None and ledger.head_digest() != head_digest:
        findings.append("replayed head digest differs from recorded digest")
    if chain_flag is not None and chain_flag != b"\x01":
        findings.append("transcript recorded a broken chain")

    from .identity import DeviceIdentity
    for blob in identities:
        try:
            identity = DeviceIdentity.load(blob)
            record = ledger.query_device_record(identity.device_id)
            if (record.pk_bytes != identity.pk.to_bytes()
                    or record.commitment_bytes != identity.response_commitment.to_bytes()):
                findings.append("exported identity disagrees with its ledger record")
        except Exception as exc:
            findings.append(f"identity export failed to load: {exc}")

    for index, session in enumerate(sessions):
        header = session["header"]
        device_len = int.from_bytes(header[8:10], "big")
        device_id = header[10:10 + device_len]
        off = 10 + device_len
        nonce_len = int.from_bytes(header[off:off + 2], "big")
        nonce = header[off + 2:off + 2 + nonce_len]
        epoch = int.from_bytes(header[off + 2 + nonce_len:off + 10 + nonce_len], "big")
        outcome = session["outcome"]
        accepted = bool(outcome and outcome[0] == 1)
        for raw in session["msgs"]:
            try:
                msg = decode_message(raw)
            except Exception as exc:
                findings.append(f"session {index}: undecodable message: {exc}")
                continue
            if raw and raw[0] == TAG_AUTH_REQUEST and accepted:
                try:
                    record = ledger.query_device_record(msg.device_id)
                    proof = zkp.CorrectedAuthProof.from_bytes(msg.proof)
                    statement = zkp.AuthStatement(
                        device_id=device_id,
                        pk=G2Element.from_bytes(record.pk_bytes),
                        response_commitment=G1Element.from_bytes(record.commitment_bytes),
                        challenge_epoch=epoch,
                        session_nonce=nonce,
                    )
                    if not zkp.auth_verify_corrected(statement, proof):
                        findings.append(f"session {index}: accepted proof fails re-verification")
                except Exception as exc:
                    findings.append(f"session {index}: proof re-verification error: {exc}")
    return not findings, findings or ["audit clean"]
