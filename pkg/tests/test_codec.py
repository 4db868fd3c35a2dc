"""Sampled code instances: encoding, ML erasure decoding, serialization,
and the jitted pattern kernel as an exact twin of the reference solver."""
import json
import math

import numpy as np
import pytest

from raptorspec import _kernels
from raptorspec.codec import (
    RaptorCodeInstance,
    code_min_distance,
    encode,
    load_instance,
    ml_decode,
    sample_code,
    save_instance,
)
from raptorspec.degrees import DegreeDistribution
from raptorspec.gf2 import BitMatrix, null_space_basis
from raptorspec.spectrum import EnsembleParams

PARAMS = EnsembleParams(16, 20, 24)


def _hand_instance():
    # k=1, h=3, n=4; outer code {000, 111}; LT columns e0, e1, e2, empty
    parity = BitMatrix(2, 3, [0b011, 0b110])
    lt = BitMatrix.from_columns([1, 2, 4, 0], 3)
    gen = BitMatrix(1, 3, [0b111])
    composite = gen @ lt
    return RaptorCodeInstance(
        params=EnsembleParams(1, 3, 4),
        outer_parity=parity,
        lt_generator=lt,
        outer_generator=gen,
        message_cols=(2,),
        composite_generator=composite,
        composite_rank=composite.rank(),
        deficient_outer=False,
    )


class TestSampling:
    def test_deterministic_under_seed(self, small_dist):
        a = sample_code(PARAMS, small_dist, np.random.default_rng(7), seed=7)
        b = sample_code(PARAMS, small_dist, np.random.default_rng(7), seed=7)
        assert a == b
        c = sample_code(PARAMS, small_dist, np.random.default_rng(8), seed=8)
        assert a != c

    def test_dimensions_and_consistency(self, rng, small_dist):
        inst = sample_code(PARAMS, small_dist, rng)
        k, h, n = PARAMS.k, PARAMS.h, PARAMS.n
        assert inst.outer_parity.rows == h - k and inst.outer_parity.cols == h
        assert inst.lt_generator.rows == h and inst.lt_generator.cols == n
        assert inst.outer_generator.rows == k
        assert inst.composite_generator == inst.outer_generator @ inst.lt_generator
        if not inst.deficient_outer:
            # generator rows really are outer codewords, systematic on
            # message_cols
            prod = inst.outer_generator @ inst.outer_parity.transpose()
            assert prod == BitMatrix.zeros(k, h - k)
            for i, c in enumerate(inst.message_cols):
                for j in range(k):
                    assert inst.outer_generator.get(j, c) == (i == j)

    def test_single_degree_columns(self, rng):
        one = DegreeDistribution.from_dict({1: 1.0})
        inst = sample_code(PARAMS, one, rng)
        for c in range(PARAMS.n):
            assert inst.lt_generator.column_word(c).bit_count() == 1

    def test_column_degree_frequencies(self, rng, omega1):
        # h >= d_max so every degree is realizable; 3 sigma per bin plus a
        # support check (a duplicate index would produce an off-support
        # weight)
        params = EnsembleParams(128, 138, 20000)
        inst = sample_code(params, omega1, rng)
        weights = np.array(
            [inst.lt_generator.column_word(c).bit_count() for c in range(params.n)]
        )
        assert set(np.unique(weights)) <= set(omega1.degrees)
        for deg, p in omega1.entries:
            freq = float(np.mean(weights == deg))
            sigma = math.sqrt(p * (1 - p) / params.n)
            assert abs(freq - p) < 4 * sigma, (deg, freq, p)

    def test_degree_above_h_rejected(self, rng, omega1):
        with pytest.raises(ValueError, match="exceeds"):
            sample_code(EnsembleParams(8, 10, 12), omega1, rng)


class TestEncode:
    def test_zero_maps_to_zero(self, rng, small_dist):
        inst = sample_code(PARAMS, small_dist, rng)
        assert encode(inst, 0) == 0

    def test_linearity(self, rng, small_dist):
        inst = sample_code(PARAMS, small_dist, rng)
        for _ in range(100):
            u1 = int(rng.integers(0, 1 << PARAMS.k))
            u2 = int(rng.integers(0, 1 << PARAMS.k))
            assert encode(inst, u1 ^ u2) == encode(inst, u1) ^ encode(inst, u2)

    def test_hand_example(self):
        inst = _hand_instance()
        assert encode(inst, 1) == 0b0111
        assert encode(inst, 0) == 0

    def test_message_width_checked(self, rng, small_dist):
        inst = sample_code(PARAMS, small_dist, rng)
        with pytest.raises(ValueError):
            encode(inst, 1 << PARAMS.k)


class TestMlDecode:
    def test_no_erasures_round_trip(self, rng, small_dist):
        inst = sample_code(PARAMS, small_dist, rng)
        while inst.non_injective:
            inst = sample_code(PARAMS, small_dist, rng)
        for _ in range(100):
            u = int(rng.integers(0, 1 << PARAMS.k))
            x = encode(inst, u)
            recv = [(pos, (x >> pos) & 1) for pos in range(PARAMS.n)]
            res = ml_decode(inst, recv)
            assert res.success and res.u == u
            assert res.rank == PARAMS.k

    def test_everything_erased(self, rng, small_dist):
        inst = sample_code(PARAMS, small_dist, rng)
        res = ml_decode(inst, [])
        assert not res.success
        assert res.rank == 0
        assert res.status == "ambiguous"

    def test_bad_received_positions(self, rng, small_dist):
        inst = sample_code(PARAMS, small_dist, rng)
        with pytest.raises(ValueError, match="duplicate"):
            ml_decode(inst, [(0, 1), (0, 0)])
        with pytest.raises(ValueError, match="outside"):
            ml_decode(inst, [(PARAMS.n, 1)])

    def test_success_iff_punctured_rank_k(self, rng, small_dist):
        # the ML criterion: decodable exactly when the received columns of
        # the composite generator span all k message dimensions
        k, n = PARAMS.k, PARAMS.n
        trials = 0
        successes = 0
        for _ in range(100):
            inst = sample_code(PARAMS, small_dist, rng)
            if inst.deficient_outer:
                continue
            for _ in range(100):
                u = int(rng.integers(0, 1 << k))
                x = encode(inst, u)
                keep = rng.random(n) >= 0.35
                recv = [(pos, (x >> pos) & 1) for pos in range(n) if keep[pos]]
                sub = BitMatrix.from_columns(
                    [inst.composite_generator.column_word(p) for p, _ in recv], k
                )
                expect = sub.rank() == k
                res = ml_decode(inst, recv)
                assert res.success == expect
                if expect:
                    assert res.u == u
                    successes += 1
                trials += 1
        assert trials == 10_000
        assert 0 < successes < trials  # both branches genuinely exercised

    def test_decoding_monotone_in_pattern(self, rng, small_dist):
        # receiving strictly more symbols can never break decodability
        inst = sample_code(PARAMS, small_dist, rng)
        while inst.non_injective:
            inst = sample_code(PARAMS, small_dist, rng)
        n = PARAMS.n
        for _ in range(1000):
            u = int(rng.integers(0, 1 << PARAMS.k))
            x = encode(inst, u)
            keep = rng.random(n) >= 0.5
            sub = [(p, (x >> p) & 1) for p in range(n) if keep[p]]
            missing = [p for p in range(n) if not keep[p]]
            if not missing:
                continue
            extra = int(rng.choice(missing))
            sup = sub + [(extra, (x >> extra) & 1)]
            if ml_decode(inst, sub).success:
                assert ml_decode(inst, sup).success

    def test_pure_peeling_zero_inactivations(self, rng):
        # k = h removes the dense parity rows; degree-1 columns peel without
        # ever stalling
        one = DegreeDistribution.from_dict({1: 1.0})
        params = EnsembleParams(12, 12, 30)
        full = (1 << params.h) - 1

        def covered(inst):
            mask = 0
            for c in range(params.n):
                mask |= inst.lt_generator.column_word(c)
            return mask == full

        inst = sample_code(params, one, rng)
        while not covered(inst):
            inst = sample_code(params, one, rng)
        u = int(rng.integers(0, 1 << params.k))
        x = encode(inst, u)
        recv = [(p, (x >> p) & 1) for p in range(params.n)]
        res = ml_decode(inst, recv)
        assert res.inactivations == 0
        assert res.success


class TestMinDistance:
    def test_hand_instances(self):
        inst = _hand_instance()
        # composite = [0111]: the only nonzero codeword has weight 3
        assert code_min_distance(inst) == 3

    def test_zero_iff_non_injective(self):
        params = EnsembleParams(2, 3, 3)
        parity = BitMatrix(1, 3, [0b111])
        lt = BitMatrix.from_columns([1, 1, 2], 3)
        gen = BitMatrix(2, 3, [0b011, 0b101])
        composite = gen @ lt
        inst = RaptorCodeInstance(
            params=params,
            outer_parity=parity,
            lt_generator=lt,
            outer_generator=gen,
            message_cols=(0, 1),
            composite_generator=composite,
            composite_rank=composite.rank(),
            deficient_outer=False,
        )
        assert inst.non_injective == (composite.rank() < 2)
        if inst.non_injective:
            assert code_min_distance(inst) == 0

    def test_matches_brute_force(self, rng, tiny_dist):
        params = EnsembleParams(8, 10, 14)
        for _ in range(20):
            inst = sample_code(params, tiny_dist, rng)
            brute = min(
                encode(inst, u).bit_count() for u in range(1, 1 << params.k)
            )
            assert code_min_distance(inst) == brute
            assert (code_min_distance(inst) == 0) == inst.non_injective

    def test_cap(self, rng, small_dist):
        inst = sample_code(EnsembleParams(25, 30, 40), small_dist, rng)
        with pytest.raises(ValueError, match="24"):
            code_min_distance(inst)


class TestSerialization:
    def test_round_trip(self, rng, small_dist, tmp_path):
        inst = sample_code(PARAMS, small_dist, rng, seed=1234)
        p = tmp_path / "code.rsc"
        save_instance(inst, p)
        back = load_instance(p)
        assert back == inst
        sidecar = json.loads((tmp_path / "code.rsc.json").read_text())
        assert sidecar["seed"] == 1234
        assert sidecar["dist"] == small_dist.name
        assert (sidecar["k"], sidecar["h"], sidecar["n"]) == (16, 20, 24)

    def test_load_without_sidecar(self, rng, small_dist, tmp_path):
        inst = sample_code(PARAMS, small_dist, rng, seed=99)
        p = tmp_path / "code.rsc"
        save_instance(inst, p)
        (tmp_path / "code.rsc.json").unlink()
        back = load_instance(p)
        assert back.seed is None
        assert back.composite_generator == inst.composite_generator

    def test_rejects_foreign_file(self, tmp_path):
        p = tmp_path / "junk.rsc"
        p.write_bytes(b"not a code instance")
        with pytest.raises(ValueError, match="not a code instance"):
            load_instance(p)


class TestKernelTwin:
    @pytest.mark.parametrize(
        "k,h,n",
        [(16, 20, 24), (50, 64, 80), (60, 70, 90)],
        ids=["small", "word-boundary", "cross-word"],
    )
    def test_pattern_kernel_matches_reference(self, rng, small_dist, k, h, n):
        params = EnsembleParams(k, h, n)
        for _ in range(3):
            inst = sample_code(params, small_dist, rng)
            parity = inst.outer_parity.to_words64()
            cols = inst.lt_generator.transpose().to_words64()
            for _ in range(60):
                u = int(rng.integers(0, 1 << k))
                x = encode(inst, u)
                keep = rng.random(n) >= float(rng.uniform(0.1, 0.5))
                positions = np.flatnonzero(keep).astype(np.int64)
                recv = [(int(p), (x >> int(p)) & 1) for p in positions]
                ref = ml_decode(inst, recv)
                ok, inact = _kernels.decode_pattern(parity, cols, positions, h)
                assert bool(ok) == (ref.status == "unique")
                assert int(inact) == ref.inactivations
