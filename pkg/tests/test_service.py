import json
import threading
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient


import gembed.cli
from gembed import GemConfig, encode_corpus
from gembed.client import ServiceClient, ServiceError
from gembed.runner import load_vectors, run_sts_pairs
from gembed.service import create_app
from gembed import SimilarityPair, TokenizerConfig, OovPolicy


@pytest.fixture
def vectors_path(tmp_path):
    rng = np.random.default_rng(70)
    path = tmp_path / "vecs.txt"
    lines = [f"w{i} " + " ".join(repr(float(x)) for x in rng.normal(size=6)) for i in range(20)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def client():
    app = create_app()
    with TestClient(app) as test_client:
        yield test_client


GEM = {"m": 2, "k": 4, "h": 2, "t": 3, "rerank": "sigma", "removal": "sdr"}
SENTENCES = ["w0 w1 w2 w3", "w4 w5 w6", "w7 w8 w9 w10 w11", "w1 w12 w13"]


def test_health(client):
    reply = client.get("/health")
    assert reply.status_code == 200
    body = reply.json()
    assert body["status"] == "ok"
    assert body["version"]


def test_store_loading_and_reuse(client, vectors_path):
    first = client.post("/stores", json={"vectors": [vectors_path]})
    assert first.status_code == 200
    info = first.json()
    assert info["dim"] == 6 and info["vocab_size"] == 20
    again = client.post("/stores", json={"vectors": [vectors_path]})
    assert again.json()["store_id"] == info["store_id"]


def test_unknown_store_id_404(client):
    reply = client.post(
        "/encode", json={"store": {"store_id": "beef"}, "sentences": ["w0"], "gem": GEM}
    )
    assert reply.status_code == 404


def test_missing_vector_file_400(client):
    reply = client.post(
        "/encode", json={"store": {"vectors": ["/no/such/file.txt"]}, "sentences": ["w0"]}
    )
    assert reply.status_code == 400


def test_store_selector_requires_exactly_one(client):
    reply = client.post("/encode", json={"store": {}, "sentences": ["w0"]})
    assert reply.status_code == 422


def test_bad_gem_params_rejected(client, vectors_path):
    bad = dict(GEM, h=99)  # h > k
    reply = client.post(
        "/encode", json={"store": {"vectors": [vectors_path]}, "sentences": ["w0"], "gem": bad}
    )
    assert reply.status_code == 422


def test_encode_matches_local_pipeline(client, vectors_path):
    reply = client.post(
        "/encode",
        json={"store": {"vectors": [vectors_path]}, "sentences": SENTENCES, "gem": GEM},
    )
    assert reply.status_code == 200
    body = reply.json()
    store = load_vectors([vectors_path])
    local = encode_corpus(SENTENCES, store, cfg=GemConfig(m=2, k=4, h=2, t=3))
    assert body["dim"] == 6
    for row, emb in zip(body["embeddings"], local):
        np.testing.assert_array_equal(np.asarray(row), emb.vector)
    manifest = body["manifest"]
    assert manifest["sentence_count"] == len(SENTENCES)
    assert manifest["m"] == 2 and manifest["removal_mode"] == "sdr"


def test_encode_with_store_id_and_scores(client, vectors_path):
    info = client.post("/stores", json={"vectors": [vectors_path]}).json()
    reply = client.post(
        "/encode",
        json={
            "store": {"store_id": info["store_id"]},
            "sentences": ["w0 w1 w2"],
            "gem": GEM,
            "include_scores": True,
        },
    )
    assert reply.status_code == 200
    [scores] = reply.json()["scores"]
    assert [s["token"] for s in scores] == ["w0", "w1", "w2"]
    for s in scores:
        assert s["weight"] == pytest.approx(s["novelty"] + s["significance"] + s["uniqueness"])


def test_encode_empty_corpus_rejected(client, vectors_path):
    reply = client.post(
        "/encode", json={"store": {"vectors": [vectors_path]}, "sentences": []}
    )
    assert reply.status_code == 422  # pydantic min_length


def test_similarity_matches_runner(client, vectors_path):
    pairs = [
        {"gold": 4.0, "sent_a": "w0 w1", "sent_b": "w1 w0 w2"},
        {"gold": 2.0, "sent_a": "w3 w4", "sent_b": "w5 w6"},
        {"gold": 3.0, "sent_a": "w7 w8", "sent_b": "w8 w9"},
    ]
    reply = client.post(
        "/similarity", json={"store": {"vectors": [vectors_path]}, "pairs": pairs, "gem": GEM}
    )
    assert reply.status_code == 200
    body = reply.json()
    store = load_vectors([vectors_path])
    expected, _ = run_sts_pairs(
        store,
        [SimilarityPair(p["gold"], p["sent_a"], p["sent_b"]) for p in pairs],
        GemConfig(m=2, k=4, h=2, t=3),
        TokenizerConfig(),
        OovPolicy.HASH_TO_VOCAB,
    )
    assert body["pearson_x100"] == pytest.approx(expected, abs=1e-12)
    assert body["pair_count"] == 3


def test_rank_and_defaults(client, vectors_path):
    queries = [
        {
            "query_id": "q1",
            "text": "w0 w1",
            "candidates": [
                {"text": "w0 w1", "label": "PerfectMatch"},
                {"text": "w9 w10", "label": "Irrelevant"},
            ],
        }
    ]
    reply = client.post("/rank", json={"store": {"vectors": [vectors_path]}, "queries": queries})
    assert reply.status_code == 200
    body = reply.json()
    assert body["mean_average_precision"] == 1.0
    # ranking defaults differ from encode defaults
    assert body["manifest"]["m"] == 6 and body["manifest"]["h"] == 15
    assert body["manifest"]["rerank_mode"] == "plain"


def test_weights_sorted_and_degenerate(client, vectors_path):
    reply = client.post(
        "/weights",
        json={"store": {"vectors": [vectors_path]}, "sentence": "w0 w1 w2 w3", "gem": GEM},
    )
    assert reply.status_code == 200
    tokens = reply.json()["tokens"]
    weights = [t["weight"] for t in tokens]
    assert weights == sorted(weights, reverse=True)

    empty = client.post(
        "/weights", json={"store": {"vectors": [vectors_path]}, "sentence": "???"}
    )
    assert empty.status_code == 400


class TestCliThinClient:
    """The CLI drives a service instead of running in process."""

    @pytest.fixture
    def patched_client(self, monkeypatch):
        app = create_app()

        def make_client(args):
            return ServiceClient(args.server, http_client=TestClient(app))

        monkeypatch.setattr(gembed.cli, "_client", make_client)

    def test_encode_equivalent_to_local(self, tmp_path, vectors_path, patched_client):
        inp = tmp_path / "in.txt"
        inp.write_text("\n".join(SENTENCES) + "\n")
        local_out = tmp_path / "local.tsv"
        remote_out = tmp_path / "remote.tsv"
        base = [
            "encode", "--vectors", vectors_path, "--input", str(inp),
            "--m", "2", "--K", "4", "--h", "2",
        ]
        assert gembed.cli.main(base + ["--output", str(local_out)]) == 0
        assert gembed.cli.main(base + ["--output", str(remote_out), "--server", "http://gembed"]) == 0
        assert local_out.read_bytes() == remote_out.read_bytes()
        manifest = json.loads((tmp_path / "remote.tsv.manifest.json").read_text())
        assert manifest["input"] == str(inp)

    def test_sts_through_server(self, tmp_path, vectors_path, patched_client, capsys):
        pairs = tmp_path / "pairs.tsv"
        pairs.write_text("4.0\tw0 w1\tw1 w0\n1.0\tw2 w3\tw4 w5\n3.0\tw6 w7\tw7 w8\n")
        code = gembed.cli.main([
            "sts", "--vectors", vectors_path, "--pairs", str(pairs),
            "--m", "2", "--K", "4", "--h", "2", "--server", "http://gembed",
        ])
        assert code == 0
        first = capsys.readouterr().out.splitlines()[0]
        float(first)  # a score line

    def test_server_error_is_data_error(self, tmp_path, patched_client, capsys):
        inp = tmp_path / "in.txt"
        inp.write_text("w0\n")
        code = gembed.cli.main([
            "encode", "--vectors", "/no/such/vectors.txt", "--input", str(inp),
            "--output", str(tmp_path / "o.tsv"), "--server", "http://gembed",
        ])
        assert code == 2
        assert "400" in capsys.readouterr().err


@pytest.mark.integration
def test_real_socket_round_trip(tmp_path, vectors_path):
    """Boot uvicorn on a local port and drive it with the plain HTTP client."""
    import uvicorn

    config = uvicorn.Config(create_app(), host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        deadline = time.time() + 10.0
        while not server.started:
            if time.time() > deadline:
                pytest.fail("server did not start within 10s")
            time.sleep(0.02)
        port = server.servers[0].sockets[0].getsockname()[1]
        with ServiceClient(f"http://127.0.0.1:{port}") as client:
            assert client.health()["status"] == "ok"
            reply = client.encode([vectors_path], ["w0 w1 w2"], GEM, {"oov": "hash", "lowercase": True})
            assert len(reply["embeddings"]) == 1
            assert len(reply["embeddings"][0]) == 6
            with pytest.raises(ServiceError):
                client.weights([vectors_path], "???", GEM, {"oov": "hash", "lowercase": True})
    finally:
        server.should_exit = True
        thread.join(timeout=10.0)
