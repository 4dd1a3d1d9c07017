#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include "cfsim/phy.hpp"
#include "cfsim/rng.hpp"
#include "oracles.hpp"

using namespace cfsim;
using Catch::Approx;

namespace {

struct Instance {
    DeploymentConfig cfg;
    FadingParams fading;
    ChannelTensor channels;
    ClusterMap cluster;
};

Instance make_instance(std::size_t L, std::size_t N, std::size_t K, std::size_t S, std::size_t M,
                       std::uint64_t seed) {
    DeploymentConfig cfg;
    cfg.area_side_m = 400.0;
    cfg.num_aps = L;
    cfg.antennas_per_ap = N;
    cfg.num_ues = K;
    cfg.num_subbands = S;
    cfg.seed = seed;
    FadingParams fading;
    Deployment dep = generate_deployment(cfg);
    ChannelTensor channels = generate_cfr(dep, fading, cfg);
    ClusterMap cluster = select_serving_aps(channels, M);
    return Instance{cfg, fading, std::move(channels), std::move(cluster)};
}

Assignment random_assignment(std::size_t K, std::size_t S, std::mt19937_64& rng,
                             double assign_prob = 1.0) {
    Assignment a(K, S);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, S - 1);
    for (std::size_t k = 0; k < K; ++k)
        if (u(rng) <= assign_prob) a.assign(k, pick(rng));
    return a;
}

// Tensor with explicitly chosen rows, S subbands, single antenna per AP.
ChannelTensor tensor_from_rows(const std::vector<std::vector<std::complex<double>>>& rows,
                               std::size_t S) {
    const std::size_t K = rows.size(), L = rows[0].size();
    std::vector<std::complex<double>> h(K * L * S);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t s = 0; s < S; ++s) h[(k * L + l) * S + s] = rows[k][l];
    return ChannelTensor(K, L, S, 1, std::move(h));
}

ClusterMap all_serving(std::size_t K, std::size_t L) {
    ClusterMap map;
    map.num_aps = L;
    map.cluster_size = L;
    map.serves.assign(K, {});
    for (auto& s : map.serves)
        for (std::size_t l = 0; l < L; ++l) s.push_back(l);
    return map;
}

}  // namespace

TEST_CASE("equal power division matches the published arithmetic") {
    CHECK(equal_power_w(0.2, 10) == Approx(0.02));
    CHECK(equal_power_w(0.5, 1) == 0.5);
    CHECK(equal_power_w(0.0, 7) == 0.0);
    REQUIRE_THROWS_AS(equal_power_w(0.2, 0), std::invalid_argument);
}

TEST_CASE("assignment type forbids malformed states by construction") {
    Assignment a(3, 4);
    CHECK(a.num_assigned() == 0);
    for (std::size_t k = 0; k < 3; ++k) CHECK_FALSE(a.is_assigned(k));
    a.assign(1, 2);
    a.assign(1, 3);
    CHECK(a.subband_of(1) == 3);
    CHECK(a.num_assigned() == 1);
    a.clear(1);
    CHECK(a.num_assigned() == 0);
    REQUIRE_THROWS_AS(a.assign(5, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(a.assign(0, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(Assignment(2, 0), std::invalid_argument);

    a.assign(0, 1);
    a.assign(2, 1);
    auto occ = a.occupancy();
    REQUIRE(occ.size() == 4);
    CHECK(occ[1] == std::vector<std::size_t>{0, 2});
    CHECK(occ[0].empty());
}

TEST_CASE("raw indicator matrices with duplicate column entries are rejected") {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(3, 2);
    m(0, 0) = 1;
    m(2, 1) = 1;
    Assignment a = validate_assignment_matrix(m);
    CHECK(a.subband_of(0) == 0);
    CHECK(a.subband_of(1) == 2);

    m(1, 0) = 1;
    REQUIRE_THROWS_AS(validate_assignment_matrix(m), std::invalid_argument);

    Eigen::MatrixXi bad = Eigen::MatrixXi::Zero(2, 1);
    bad(0, 0) = 2;
    REQUIRE_THROWS_AS(validate_assignment_matrix(bad), std::invalid_argument);

    Eigen::MatrixXi empty_col = Eigen::MatrixXi::Zero(2, 3);
    Assignment none = validate_assignment_matrix(empty_col);
    CHECK(none.num_assigned() == 0);
}

TEST_CASE("a lone user keeps only itself in the nulling group") {
    Instance inst = make_instance(4, 2, 3, 3, 2, 5);
    Assignment a(3, 3);
    a.assign(0, 0);
    a.assign(1, 1);
    a.assign(2, 2);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(interference_members(a, inst.cluster, k) == std::vector<std::size_t>{k});
    Assignment uneven(3, 3);
    REQUIRE_THROWS_AS(interference_members(uneven, inst.cluster, 0), std::invalid_argument);
}

TEST_CASE("co-channel users with disjoint clusters stay out of the nulling group") {
    ClusterMap map;
    map.num_aps = 4;
    map.cluster_size = 1;
    map.serves = {{0}, {3}};
    Assignment a(2, 2);
    a.assign(0, 1);
    a.assign(1, 1);
    CHECK(interference_members(a, map, 0) == std::vector<std::size_t>{0});
    CHECK(interference_members(a, map, 1) == std::vector<std::size_t>{1});
}

TEST_CASE("nulling group matches a dense selector product scan") {
    std::mt19937_64 rng(substream_seed(31, 2));
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        Instance inst = make_instance(5, 2, 6, 3, 1 + trial % 4, 600 + trial);
        Assignment a = random_assignment(6, 3, rng, 0.8);
        for (std::size_t k = 0; k < 6; ++k) {
            if (!a.is_assigned(k)) continue;
            std::vector<std::size_t> expect;
            for (std::size_t i = 0; i < 6; ++i) {
                if (!a.is_assigned(i) || a.subband_of(i) != a.subband_of(k)) continue;
                Eigen::MatrixXcd di = oracle::dense_selector(inst.cluster.serves[i], 5, 2);
                Eigen::MatrixXcd dk = oracle::dense_selector(inst.cluster.serves[k], 5, 2);
                if (i == k || (di * dk).cwiseAbs().maxCoeff() > 0.0) expect.push_back(i);
            }
            REQUIRE(interference_members(a, inst.cluster, k) == expect);
        }
    }
}

TEST_CASE("single user beam is the scaled masked conjugate") {
    Instance inst = make_instance(4, 2, 1, 2, 2, 9);
    const double rho = 0.02;
    Eigen::VectorXcd row = inst.channels.stacked_row(0, 1);
    ZfVector beam = zf_precoder({row}, inst.cluster, 0, rho);
    REQUIRE(beam.feasible);
    Eigen::VectorXcd masked = mask_channel(row, inst.cluster, 0, 2);
    Eigen::VectorXcd expect = std::sqrt(rho) / masked.norm() * masked.conjugate();
    CHECK((beam.w - expect).norm() <= 1e-12 * expect.norm());
    const std::complex<double> sig = row.cwiseProduct(beam.w).sum();
    CHECK(sig.real() == Approx(masked.norm() * std::sqrt(rho)).epsilon(1e-10));
    CHECK(std::abs(sig.imag()) <= 1e-12 * std::abs(sig.real()));
}

TEST_CASE("two users on one shared access point null each other") {
    std::mt19937_64 rng(substream_seed(31, 3));
    std::normal_distribution<double> gauss(0.0, 1.0);
    ClusterMap map = all_serving(2, 1);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Eigen::VectorXcd> rows(2, Eigen::VectorXcd(4));
        for (auto& r : rows)
            for (int n = 0; n < 4; ++n) r[n] = {gauss(rng), gauss(rng)};
        ZfVector w0 = zf_precoder({rows[0], rows[1]}, map, 0, 0.02);
        REQUIRE(w0.feasible);
        const double leak = std::abs(rows[1].cwiseProduct(w0.w).sum());
        REQUIRE(leak <= 1e-10 * rows[1].norm() * w0.w.norm());

        Eigen::VectorXcd v = rows[1].conjugate();
        Eigen::VectorXcd target = rows[0].conjugate();
        Eigen::VectorXcd proj = target - v * (v.adjoint() * target)(0, 0) / v.squaredNorm();
        const double align =
            std::abs((proj.adjoint() * w0.w)(0, 0)) / (proj.norm() * w0.w.norm());
        REQUIRE(align == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("zero power yields a zero beam that stays feasible") {
    Instance inst = make_instance(4, 2, 1, 2, 2, 10);
    Eigen::VectorXcd row = inst.channels.stacked_row(0, 0);
    ZfVector beam = zf_precoder({row}, inst.cluster, 0, 0.0);
    CHECK(beam.feasible);
    CHECK(beam.w.norm() == 0.0);
}

TEST_CASE("overloaded nulling groups and singular geometries are infeasible") {
    ClusterMap map = all_serving(2, 1);
    std::vector<std::vector<std::complex<double>>> rows{{
                                                            {1.0, 0.2},
                                                        },
                                                        {
                                                            {0.4, -0.1},
                                                        }};
    ChannelTensor single_antenna = tensor_from_rows(rows, 1);
    Assignment a(2, 1);
    a.assign(0, 0);
    a.assign(1, 0);
    PhyConfig phy;
    phy.noise_w = 1e-9;
    PrecodeResult res = evaluate_phy(single_antenna, map, a, phy);
    CHECK(res.num_infeasible == 2);
    CHECK(res.se_bps_hz[0] == 0.0);
    CHECK(res.se_bps_hz[1] == 0.0);
    CHECK(res.rho_w[0] == Approx(0.02));

    std::vector<Eigen::VectorXcd> identical(2, Eigen::VectorXcd(4));
    identical[0] << std::complex<double>(1, 1), std::complex<double>(0.5, 0),
        std::complex<double>(0, -1), std::complex<double>(0.2, 0.3);
    identical[1] = identical[0];
    ClusterMap one_ap = all_serving(2, 1);
    ZfVector w = zf_precoder(identical, one_ap, 0, 0.02);
    CHECK_FALSE(w.feasible);
}

TEST_CASE("single user with noise equal to received power reaches one bit") {
    ClusterMap map = all_serving(1, 1);
    ChannelTensor h = tensor_from_rows({{{1.0, 0.0}}}, 1);
    Assignment a(1, 1);
    a.assign(0, 0);
    PhyConfig phy;
    phy.p_max_w = 0.2;
    phy.tau_p = 10;
    phy.noise_w = 0.02;
    PrecodeResult res = evaluate_phy(h, map, a, phy);
    REQUIRE(res.num_infeasible == 0);
    CHECK(res.sinr[0] == Approx(1.0).epsilon(1e-12));
    CHECK(res.se_bps_hz[0] == Approx(1.0).epsilon(1e-12));

    phy.noise_w = 0.02 / 3.0;
    res = evaluate_phy(h, map, a, phy);
    CHECK(res.sinr[0] == Approx(3.0).epsilon(1e-12));
    CHECK(res.se_bps_hz[0] == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("interference accumulation matches a naive recomputation") {
    std::mt19937_64 rng(substream_seed(31, 4));
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        Instance inst = make_instance(4, 2, 4, 2, 2, 700 + trial);
        Assignment a = random_assignment(4, 2, rng);
        PhyConfig phy;
        phy.noise_w = noise_power_w(inst.cfg, inst.fading);
        PrecodeResult res = evaluate_phy(inst.channels, inst.cluster, a, phy);
        for (std::size_t k = 0; k < 4; ++k) {
            if (!a.is_assigned(k) || res.zf_infeasible[k]) continue;
            const std::size_t s = a.subband_of(k);
            Eigen::VectorXcd hk = inst.channels.stacked_row(k, s);
            std::complex<double> sig{0.0, 0.0};
            for (Eigen::Index n = 0; n < hk.size(); ++n) sig += hk[n] * res.w[k][n];
            double denom = phy.noise_w;
            for (std::size_t i = 0; i < 4; ++i) {
                if (i == k || !a.is_assigned(i) || a.subband_of(i) != s) continue;
                std::complex<double> leak{0.0, 0.0};
                for (Eigen::Index n = 0; n < hk.size(); ++n) leak += hk[n] * res.w[i][n];
                denom += std::norm(leak);
            }
            REQUIRE(res.sinr[static_cast<Eigen::Index>(k)] ==
                    Approx(std::norm(sig) / denom).epsilon(1e-12));
        }
    }
}

TEST_CASE("beams null every overlapping co-channel user and carry the allocated power") {
    std::mt19937_64 rng(substream_seed(31, 5));
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        Instance inst = make_instance(16, 2, 8, 12, 4, 800 + trial);
        Assignment a = random_assignment(8, 12, rng, 0.9);
        PhyConfig phy;
        phy.noise_w = noise_power_w(inst.cfg, inst.fading);
        PrecodeResult res = evaluate_phy(inst.channels, inst.cluster, a, phy);
        const double rho = equal_power_w(phy.p_max_w, phy.tau_p);
        double total_rho = 0.0;
        for (std::size_t k = 0; k < 8; ++k) {
            if (!a.is_assigned(k)) {
                CHECK(res.rho_w[static_cast<Eigen::Index>(k)] == 0.0);
                CHECK(res.se_bps_hz[static_cast<Eigen::Index>(k)] == 0.0);
                continue;
            }
            total_rho += res.rho_w[static_cast<Eigen::Index>(k)];
            if (res.zf_infeasible[k]) continue;
            CHECK(res.w[k].squaredNorm() == Approx(rho).epsilon(1e-9));
            for (std::size_t l = 0; l < 16; ++l) {
                bool served = std::find(inst.cluster.serves[k].begin(), inst.cluster.serves[k].end(),
                                        l) != inst.cluster.serves[k].end();
                if (!served)
                    CHECK(res.w[k].segment(static_cast<Eigen::Index>(2 * l), 2).norm() == 0.0);
            }
            const std::size_t s = a.subband_of(k);
            for (std::size_t i : interference_members(a, inst.cluster, k)) {
                if (i == k) continue;
                Eigen::VectorXcd hi = inst.channels.stacked_row(i, s);
                const double leak = std::abs(hi.cwiseProduct(res.w[k]).sum());
                CHECK(leak <= 1e-9 * hi.norm() * res.w[k].norm());
            }
        }
        CHECK(total_rho == Approx(static_cast<double>(a.num_assigned()) * rho).epsilon(1e-12));
    }
}

TEST_CASE("raising the noise floor never raises spectral efficiency") {
    std::mt19937_64 rng(substream_seed(31, 6));
    Instance inst = make_instance(6, 2, 5, 3, 3, 901);
    Assignment a = random_assignment(5, 3, rng);
    PhyConfig phy;
    phy.noise_w = 1e-12;
    PrecodeResult quiet = evaluate_phy(inst.channels, inst.cluster, a, phy);
    phy.noise_w = 1e-10;
    PrecodeResult loud = evaluate_phy(inst.channels, inst.cluster, a, phy);
    for (Eigen::Index k = 0; k < 5; ++k) CHECK(loud.se_bps_hz[k] <= quiet.se_bps_hz[k]);
}

TEST_CASE("users on different subbands are perfectly isolated") {
    Instance inst = make_instance(6, 2, 2, 2, 3, 902);
    PhyConfig phy;
    phy.noise_w = noise_power_w(inst.cfg, inst.fading);

    Assignment both(2, 2);
    both.assign(0, 0);
    both.assign(1, 1);
    PrecodeResult pair = evaluate_phy(inst.channels, inst.cluster, both, phy);

    Assignment solo(2, 2);
    solo.assign(0, 0);
    PrecodeResult alone = evaluate_phy(inst.channels, inst.cluster, solo, phy);
    CHECK(pair.se_bps_hz[0] == alone.se_bps_hz[0]);
    CHECK(pair.sinr[0] == alone.sinr[0]);
}

TEST_CASE("the printed normalization variant scales by the root of the beam norm") {
    Instance inst = make_instance(4, 2, 1, 2, 2, 11);
    Eigen::VectorXcd row = inst.channels.stacked_row(0, 0);
    const double rho = 0.02;
    ZfVector conventional = zf_precoder({row}, inst.cluster, 0, rho, ZfScaling::unit_rescale);
    ZfVector printed = zf_precoder({row}, inst.cluster, 0, rho, ZfScaling::as_printed);
    REQUIRE(conventional.feasible);
    REQUIRE(printed.feasible);
    CHECK(conventional.w.squaredNorm() == Approx(rho).epsilon(1e-12));
    Eigen::VectorXcd masked = mask_channel(row, inst.cluster, 0, 2);
    const double unnorm = 1.0 / masked.norm();  // single-user beam before scaling
    CHECK(printed.w.squaredNorm() == Approx(rho * unnorm).epsilon(1e-9));
}

TEST_CASE("per user results serialize with the documented header") {
    Instance inst = make_instance(4, 2, 2, 2, 2, 12);
    Assignment a(2, 2);
    a.assign(0, 1);
    PhyConfig phy;
    phy.noise_w = noise_power_w(inst.cfg, inst.fading);
    PrecodeResult res = evaluate_phy(inst.channels, inst.cluster, a, phy);
    std::ostringstream out;
    export_phy_csv(res, a, out);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "ue_index,subband,sinr_db,se_bps_hz");
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("0,1,", 0) == 0);
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("1,,,", 0) == 0);
}
