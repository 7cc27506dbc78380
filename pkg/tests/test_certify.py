import json

import pytest

from quatcert import (
    GrammarError,
    InputError,
    RamificationSet,
    build_witness,
    catalog,
    decode_certificate,
    encode_certificate,
    parse_place,
    verify_certificate,
)

SIGMA = [parse_place("2+i"), parse_place("2-i")]


@pytest.fixture(scope="module")
def cert():
    return build_witness("gaussian", SIGMA, 3)


@pytest.fixture(scope="module")
def cert_text(cert):
    return encode_certificate(cert)


def failing_checks(report):
    return [name for name, ok, _ in report.checks if not ok]


class TestBuild:
    def test_example_content(self, cert):
        assert str(cert.presentation) == "(2, 5)"
        assert str(cert.d) == "6"
        assert cert.group.trdeg_bound == 13
        assert cert.group.algebra == "M_3(Q)"
        assert [str(v) for v in cert.sigma] == ["1+2i", "2+i"]

    def test_verifies(self, cert):
        report = verify_certificate(cert)
        assert report.passed, failing_checks(report)

    def test_deterministic_bytes(self, cert_text):
        again = encode_certificate(build_witness("gaussian", SIGMA, 3))
        assert again == cert_text

    def test_input_validation(self):
        with pytest.raises(InputError, match="odd"):
            build_witness("gaussian", SIGMA, 4)
        with pytest.raises(InputError):
            build_witness("gaussian", SIGMA, 1)
        with pytest.raises(InputError, match="even"):
            build_witness("gaussian", [parse_place("2+i")], 3)
        with pytest.raises(InputError):
            build_witness("fq:7", [parse_place("t@7")], 3)  # 7 = 3 mod 4
        with pytest.raises(InputError):
            build_witness("gaussian", [], 3)

    def test_higher_n_shares_core(self, cert):
        cert5 = build_witness("gaussian", SIGMA, 5)
        assert cert5.presentation == cert.presentation
        assert cert5.d == cert.d
        assert cert5.group.trdeg_bound == 19


class TestCatalog:
    def test_bounds_formula(self):
        certs = catalog([3, 5, 7, 9], "gaussian", SIGMA)
        assert [c.group.trdeg_bound for c in certs] == [13, 19, 25, 31]
        for c in certs:
            assert verify_certificate(c).passed

    def test_rejects_bad_n(self):
        with pytest.raises(InputError):
            catalog([2], "gaussian", SIGMA)
        with pytest.raises(InputError):
            catalog([3, 4], "gaussian", SIGMA)
        with pytest.raises(InputError):
            catalog([1], "gaussian", SIGMA)


class TestRoundTrip:
    def test_exact(self, cert, cert_text):
        assert decode_certificate(cert_text) == cert

    def test_bad_element_grammar(self, cert_text):
        broken = cert_text.replace('"d": "6"', '"d": "6+i i"')
        with pytest.raises(GrammarError):
            decode_certificate(broken)

    def test_version_checked(self, cert_text):
        broken = cert_text.replace('"format_version": 1',
                                   '"format_version": 999')
        with pytest.raises(GrammarError, match="version"):
            decode_certificate(broken)

    def test_unknown_fields_rejected(self, cert_text):
        doc = json.loads(cert_text)
        doc["extra"] = 1
        with pytest.raises(GrammarError, match="unknown"):
            decode_certificate(json.dumps(doc))
        doc2 = json.loads(cert_text)
        doc2["group"]["surprise"] = True
        with pytest.raises(GrammarError, match="unknown"):
            decode_certificate(json.dumps(doc2))

    def test_missing_fields_rejected(self, cert_text):
        doc = json.loads(cert_text)
        del doc["sigma"]
        with pytest.raises(GrammarError, match="missing"):
            decode_certificate(json.dumps(doc))


class TestVerifyFailures:
    def test_edited_d_fails_local_square(self, cert_text):
        broken = decode_certificate(cert_text.replace('"d": "6"',
                                                      '"d": "5"'))
        report = verify_certificate(broken)
        assert not report.passed
        # 5 has odd valuation at 2+i, so local squareness breaks
        assert "d-local-square-on-sigma" in failing_checks(report)

    def test_dropped_sigma_place_fails_parity(self, cert_text):
        doc = json.loads(cert_text)
        doc["sigma"] = ["2+i"]
        report = verify_certificate(decode_certificate(json.dumps(doc)))
        assert "sigma-even-cardinality" in failing_checks(report)

    def test_wrong_trdeg_detected(self, cert_text):
        doc = json.loads(cert_text)
        doc["group"]["trdeg_bound"] = 14
        report = verify_certificate(decode_certificate(json.dumps(doc)))
        assert "trdeg-bound-formula" in failing_checks(report)

    def test_tampered_witness_vector_detected(self, cert_text):
        doc = json.loads(cert_text)
        doc["neg_nrd"]["global_witness"][0] = "2"
        report = verify_certificate(decode_certificate(json.dumps(doc)))
        assert "neg-nrd-transcript" in failing_checks(report)

    def test_edited_presentation_detected(self, cert_text):
        # (6, 5) splits at 2+i, so the ramification recomputation trips
        doc = json.loads(cert_text)
        doc["presentation"]["a"] = "6"
        report = verify_certificate(decode_certificate(json.dumps(doc)))
        assert "ramification-set-matches-sigma" in failing_checks(report)

    def test_isomorphic_presentation_swap_detected(self, cert_text):
        # (3, 5) has the same ramification; the transcripts still notice
        doc = json.loads(cert_text)
        doc["presentation"]["a"] = "3"
        report = verify_certificate(decode_certificate(json.dumps(doc)))
        assert not report.passed


class TestFunctionFieldCertificate:
    def test_build_verify_roundtrip(self):
        cert = build_witness("fq:5", [parse_place("t@5"),
                                      parse_place("t-1@5")], 3)
        report = verify_certificate(cert)
        assert report.passed, failing_checks(report)
        text = encode_certificate(cert)
        assert decode_certificate(text) == cert
        assert cert.field_q == 5

    def test_dyadic_sigma_member_allowed(self):
        cert = build_witness("gaussian", [parse_place("1+i"),
                                          parse_place("2+i")], 3,
                             height_bound=30)
        report = verify_certificate(cert)
        assert report.passed, failing_checks(report)
        # obstructions only at the odd place
        assert [str(o.place) for o in cert.obstructions] == ["2+i"]
