import csv
import io as stdio
from fractions import Fraction

import pytest

from selfdetermined import CommunityParams, InvalidInput, RankedSystem, SocialGraph, WeightedSystem, verify_ranked_community
from selfdetermined import io
from selfdetermined.cli import main
from selfdetermined.generators import gen_gnp, gen_planted_faceted, gen_planted_weighted, gen_random_ranked
from selfdetermined.weighted import BlobMap

F = Fraction
TWO_PAIRS_TEXT = "ranked 4\n0: 0 1 2 3\n1: 1 0 2 3\n2: 2 3 0 1\n3: 3 2 0 1\n"


class TestNumbers:
    @pytest.mark.parametrize("x,text", [(F(1, 2), "0.5"), (F(3, 4), "0.75"), (1, "1"), (F(0), "0")])
    def test_exact_decimal(self, x, text):
        assert io.format_number(x) == text

    @pytest.mark.parametrize("x", [F(1, 3), F(2, 7), F(123, 1000)])
    def test_round_trip(self, x):
        assert abs(io.parse_number(io.format_number(x), 1) - x) < 1e-15

    def test_bad_token(self):
        with pytest.raises(InvalidInput, match="line 4"):
            io.parse_number("abc", 4)


class TestRoundTrip:
    def test_ranked(self, two_pairs):
        assert io.write_ranked(io.read_ranked(io.write_ranked(two_pairs))) == io.write_ranked(two_pairs)
        assert io.write_ranked(two_pairs) == TWO_PAIRS_TEXT

    def test_ranked_partial(self):
        system = gen_random_ranked(9, rng=2, partial_prob=0.6)
        back = io.read_ranked(io.write_ranked(system))
        assert all(back.ranking(i).tolist() == system.ranking(i).tolist() for i in range(9))

    def test_weighted(self):
        system, _, _ = gen_planted_weighted(8, 3, rng=1)
        back = io.read_weighted(io.write_weighted(system))
        assert (back.dense() == system.dense()).all()

    def test_weighted_thirds_survive(self):
        system = WeightedSystem(2, {(0, 1): F(1, 3)})
        assert abs(io.read_weighted(io.write_weighted(system)).weight(0, 1) - F(1, 3)) < 1e-15

    def test_faceted(self):
        system, _ = gen_planted_faceted(8, 3, rng=0, f=3)
        text = io.write_faceted(system)
        assert io.write_faceted(io.read_faceted(text)) == text

    @pytest.mark.parametrize("directed", [True, False])
    def test_graph(self, directed):
        graph = SocialGraph(5, [(0, 1, 0.5), (2, 3), (4, 0, 0.25)], directed=directed, selfloops=True)
        text = io.write_graph(graph)
        back = io.read_graph(text)
        assert back.directed == directed and back.selfloops
        assert back.edges() == graph.edges()

    def test_communities(self, half):
        text = io.write_communities([(2, 3), (0, 1)], half, planted=True)
        assert text.startswith("# planted\n")
        params, sets = io.read_communities(text)
        assert params == half and sets == [(0, 1), (2, 3)]

    def test_reduced_blobmap(self, two_pairs):
        text = io.write_reduced(two_pairs, BlobMap(2, 2))
        blobs = io.read_blobmap(text)
        assert (blobs.k, blobs.n) == (2, 2)
        assert io.write_ranked(io.read_ranked(text)) == TWO_PAIRS_TEXT

    def test_file_paths(self, tmp_path, two_pairs):
        path = tmp_path / "a.txt"
        io.write_ranked(two_pairs, path)
        assert isinstance(io.read_system(path), RankedSystem)
        assert isinstance(io.read_system(str(path)), RankedSystem)


class TestParseErrors:
    @pytest.mark.parametrize(
        "text,match",
        [
            ("rank 2\n", "line 1"),
            ("ranked 2\n0: 0 1\n0: 1 0\n", "line 3"),
            ("ranked 2\n0: 0 0\n", "line 2"),
            ("ranked 2\n0: 0 5\n", "line 2"),
            ("weighted 2\n0 1 x\n", "line 2"),
            ("weighted 2\n0 1 1.5\n", "line 2"),
            ("faceted 2 2\n0/1: 0 1\n0/3: 1 0\n", "line 3"),
            ("graph 3 sideways\n", "line 1"),
            ("graph 3 undirected\n0 7\n", "line 2"),
        ],
    )
    def test_line_numbers(self, text, match):
        with pytest.raises(InvalidInput, match=match):
            io.read_system(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInput):
            io.read_ranked(tmp_path / "nope.txt")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def two_pairs_file(tmp_path):
    path = tmp_path / "two_pairs.txt"
    path.write_text(TWO_PAIRS_TEXT)
    return path


class TestCli:
    def test_verify_yes(self, capsys, two_pairs_file):
        code, out, _ = run(capsys, "verify", "--ranked", two_pairs_file, "--set", "0 1", "--alpha", "1", "--beta", "0.5")
        assert code == 0 and "community: yes" in out
        assert "in  0: 2" in out

    def test_verify_no(self, capsys, two_pairs_file):
        code, out, _ = run(capsys, "verify", "--ranked", two_pairs_file, "--set", "0 2", "--alpha", "1", "--beta", "0.5")
        assert code == 1 and "community: no" in out

    def test_bad_header_exit_two(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("rankd 4\n")
        code, _, err = run(capsys, "verify", "--ranked", path, "--set", "0", "--alpha", "1", "--beta", "0.5")
        assert code == 2 and "line 1" in err

    def test_budget_exit_three(self, capsys, tmp_path):
        path = tmp_path / "big.txt"
        io.write_ranked(gen_random_ranked(20, rng=0), path)
        code, _, err = run(capsys, "oracle", "--ranked", path, "--alpha", "1", "--beta", "0.5", "--limit", "10")
        assert code == 3 and "error" in err

    def test_unsupported_exit_two(self, capsys, two_pairs_file):
        code, _, _ = run(capsys, "local", "--ranked", two_pairs_file, "--alpha", "0.5", "--beta", "0.25")
        assert code == 2

    def test_enumerate_matches_oracle(self, capsys, two_pairs_file):
        args = ("--ranked", two_pairs_file, "--alpha", "1", "--beta", "0.5")
        code, enumerated, _ = run(capsys, "enumerate", *args)
        assert code == 0
        _, oracle, _ = run(capsys, "oracle", *args)
        assert io.read_communities(enumerated) == io.read_communities(oracle)

    @pytest.mark.parametrize("command", [("enumerate", "--sizes", "4", "--k1", "1"), ("local", "--max-size", "6")])
    def test_threads_do_not_change_output(self, capsys, tmp_path, command):
        path = tmp_path / "blob.txt"
        assert main(["generate", "blob", "--L", "3", "--b", "4", "--rng-seed", "2", "--out", str(path)]) == 0
        args = (*command, "--ranked", path, "--alpha", "1", "--beta", "0.5", "--rng-seed", "7")
        _, single, _ = run(capsys, *args)
        _, multi, _ = run(capsys, *args, "--threads", "4")
        assert single == multi and single.count("\n") >= 4

    def test_generate_then_verify(self, capsys, tmp_path):
        system_path, planted_path = tmp_path / "pair.txt", tmp_path / "planted.txt"
        code = main(["generate", "overlap-pair", "--n", "32", "--out", str(system_path), "--planted", str(planted_path)])
        assert code == 0
        params, sets = io.read_communities(planted_path)
        system = io.read_ranked(system_path)
        assert len(sets) == 2 and all(verify_ranked_community(system, S, params) for S in sets)
        for S in sets:
            code, _, _ = run(capsys, "verify", "--ranked", system_path, "--set", " ".join(map(str, S)),
                             "--alpha", params.alpha, "--beta", params.beta)
            assert code == 0

    def test_generate_is_deterministic(self, capsys):
        _, a, _ = run(capsys, "generate", "gnp-clique", "--n", "40", "--rng-seed", "3")
        _, b, _ = run(capsys, "generate", "gnp-clique", "--n", "40", "--rng-seed", "3")
        assert a == b and a.startswith("graph 40 undirected selfloops")

    def test_lift(self, capsys, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("graph 3 undirected\n0 1\n1 2\n")
        code, out, _ = run(capsys, "lift", "--graph", path, "--method", "shortest-path")
        system = io.read_weighted(out)
        assert code == 0 and system.weight(0, 2) == F(1, 2)

    def test_graph_cluster(self, capsys, tmp_path):
        path = tmp_path / "g.txt"
        io.write_graph(gen_gnp(6, 0, selfloops=True, rng=0), path)
        code, out, _ = run(capsys, "verify", "--graph", path, "--set", "2", "--cluster", "--alpha", "1", "--beta", "0.5")
        assert code == 0 and "cluster: yes" in out

    def test_weighted_enumerate(self, capsys, tmp_path, tri_weighted):
        path = tmp_path / "w.txt"
        io.write_weighted(tri_weighted, path)
        code, out, _ = run(capsys, "enumerate", "--weighted", path, "--sizes", "2", "--alpha", "0.5", "--beta", "0.25",
                           "--k1", "1", "--k2", "6", "--n2", "6")
        assert code == 0 and (0, 1) in io.read_communities(out)[1]

    def test_reduce(self, capsys, tmp_path, tri_weighted):
        path = tmp_path / "w.txt"
        io.write_weighted(tri_weighted, path)
        code, out, _ = run(capsys, "reduce", "--weighted", path, "--size", "2", "--alpha", "0.5", "--beta", "0.25",
                           "--epsilon", "0.1")
        assert code == 0 and io.read_blobmap(out).k == 10

    def test_facets(self, capsys, tmp_path, two_pairs_faceted):
        path = tmp_path / "f.txt"
        io.write_faceted(two_pairs_faceted, path)
        code, out, _ = run(capsys, "facets", "--faceted", path, "--set", "0 1", "--alpha", "1", "--beta", "0.5")
        assert code == 0 and out.strip() == "0/1 1/1"
        code, out, _ = run(capsys, "verify", "--faceted", path, "--set", "0 1", "--psi", "2 1", "--alpha", "1", "--beta", "0.5")
        assert code == 1

    def test_local_single_seed(self, capsys, two_pairs_file):
        code, out, _ = run(capsys, "local", "--ranked", two_pairs_file, "--seed-member", "2", "--size", "2",
                           "--alpha", "1", "--beta", "0.5")
        assert code == 0 and io.read_communities(out)[1] == [(2, 3)]

    def test_report_csv(self, capsys):
        code, out, _ = run(capsys, "report", "--ns", "10", "--trials", "2")
        rows = list(csv.DictReader(stdio.StringIO(out)))
        assert code == 0 and len(rows) == 2
        assert list(rows[0]) == ["n", "l", "p", "k", "eps", "delta", "seed", "clusters", "heuristic_mean"]
