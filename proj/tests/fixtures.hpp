#pragma once

// Shared test fixtures: hand-frozen datasets with known estimator behaviour
// and generators for randomized geometry cases.

#include <cmath>
#include <utility>
#include <vector>

#include "fourpl.hpp"
#include "geo.hpp"
#include "ingest.hpp"
#include "rng.hpp"
#include "synth.hpp"

namespace fixtures {

inline gnssheight::ingest::BuildingDataset
make_dataset(std::vector<gnssheight::ingest::DataTuple> tuples) {
    gnssheight::ingest::BuildingDataset ds;
    ds.building_id = "fixture";
    ds.tuples = std::move(tuples);
    return ds;
}

inline gnssheight::fourpl::FourPLParams default_signal_init() {
    gnssheight::fourpl::FourPLParams p;
    p.a = 0.9;
    p.b = 0.2;
    p.c = 30.0;
    p.d = 0.1;
    return p;
}

/// Cleanly separated in both feature spaces: the co-training labels are
/// identical from the first relabel onward, so iteration 2 sees zero changes.
inline gnssheight::ingest::BuildingDataset separated_dataset() {
    std::vector<gnssheight::ingest::DataTuple> t;
    for (int i = 0; i < 30; ++i)
        t.push_back({-1, 5.0 + 0.1 * i, 20.0 + 0.05 * i});
    for (int i = 0; i < 30; ++i)
        t.push_back({-1, 30.0 + 0.1 * i, 40.0 + 0.05 * i});
    return make_dataset(std::move(t));
}

/// Period-2 labelling cycle under the default stopping rule: exactly one map
/// label flips per iteration (never fewer than 1% of n = 100) while the map
/// parameters swing between two states, so only the iteration cap fires.
inline gnssheight::ingest::BuildingDataset oscillating_dataset() {
    static const double rows[][2] = {
        // cn0, intersection height
        {4.6010523146683484, 23.614036175097695},
        {9.8886519245303095, 24.362560652042305},
        {6.0944767866234466, 13.852538002202666},
        {8.0788652379018391, 11.154961390810666},
        {12.600409291492106, 11.382663275578597},
        {11.891734982197827, 13.964823763472046},
        {5.5371283104936859, 11.560946718022464},
        {4.7858968039248229, 10.880025913458082},
        {9.8567344695809638, 13.406943802161923},
        {12.741227493041055, 10.118863960928715},
        {7.4462702678188206, 25.323626825232715},
        {3.4356420330057054, 24.74533687508881},
        {6.0028269004441759, 21.987431006715909},
        {3.4528754590914148, 16.841258165092896},
        {13.325752833943497, 12.078204008094984},
        {7.2761916148711734, 14.090132137965576},
        {9.1936388341856059, 10.352412451515329},
        {12.335039260712133, 17.590057447635953},
        {2.3601721415289583, 14.684843430828698},
        {9.8417515127194939, 15.277342863508949},
        {6.5000697077928802, 11.812446735038225},
        {9.5482760609432713, 20.197550325284034},
        {4.1384787298745422, 23.85024759432725},
        {7.1368583735011448, 15.286197245983638},
        {8.1377022686118963, 17.227377170571614},
        {10.106305877492755, 23.89183408981015},
        {5.9617418814322356, 16.697841698213686},
        {4.7010002529521664, 23.174001680527667},
        {3.7461173071559313, 17.256479760049487},
        {9.6633350837042258, 21.91949806451985},
        {8.96031897331053, 10.559310040709221},
        {12.577379886077246, 11.951267556794386},
        {12.031063926752845, 21.772226992463803},
        {13.140142306103174, 10.183888355739271},
        {2.1007445014139434, 13.61490828059218},
        {18.637762145448765, 32.385091719407818},
        {25.092425041814423, 13.614908280592182},
        {26.604034460677042, 32.385091719407818},
        {21.81434334352538, 13.614908280592182},
        {16.734330864411252, 32.385091719407818},
        {21.12791555312894, 13.614908280592182},
        {15.229868066019053, 32.385091719407818},
        {21.503193822601261, 13.614908280592182},
        {24.860204835919248, 32.385091719407818},
        {14.078145494706732, 13.614908280592182},
        {21.223846879380719, 32.385091719407818},
        {26.818175436379601, 13.614908280592182},
        {15.99294462776588, 32.385091719407818},
        {19.880313797248661, 13.614908280592182},
        {15.887396112803259, 32.385091719407818},
        {14.436309863070907, 13.614908280592182},
        {16.996278998755116, 32.385091719407818},
        {24.190807453961476, 13.614908280592182},
        {20.169527898109259, 32.385091719407818},
        {15.270010616816331, 13.614908280592182},
        {15.609093426605595, 32.385091719407818},
        {27.896450534576005, 13.614908280592182},
        {15.640195907018201, 32.385091719407818},
        {18.23711281810715, 13.614908280592182},
        {27.837532921611608, 32.385091719407818},
        {14.684399800372331, 13.614908280592182},
        {23.757766916978902, 32.385091719407818},
        {26.496858672522308, 13.614908280592182},
        {23.76375593007554, 32.385091719407818},
        {23.566726205150992, 13.614908280592182},
        {31.605858338088801, 30.831535226406967},
        {29.417866516479165, 32.970079223280237},
        {34.5732404995831, 35.517670890668221},
        {33.534147524107624, 43.768900603817407},
        {29.811434599469234, 35.229849926140147},
        {36.818439400204447, 40.292097188290995},
        {28.63849989362885, 36.169319709014729},
        {31.21227388851905, 44.314942450702262},
        {37.952224474777331, 35.779563128767634},
        {35.597851058547036, 32.129915403932102},
        {28.750881384662431, 30.958354388956085},
        {33.897358911673578, 44.186647652717191},
        {39.863066652793151, 44.832117158578782},
        {36.143902890386542, 38.153328907654775},
        {36.403376909227113, 33.821175922086653},
        {35.647844192201859, 45.305504920760725},
        {39.774166354174731, 37.732462291769011},
        {37.519192723620932, 42.166377015135907},
        {39.799213233034742, 36.873048326380527},
        {37.705255854460873, 35.241928820122709},
        {38.942095261558521, 42.968537269054451},
        {39.55768226209581, 43.856351956799038},
        {32.14305797885708, 34.289475837933267},
        {28.741647939095028, 31.252032486793112},
        {36.410571982393535, 34.757254174494122},
        {30.025399900530743, 43.210541853590207},
        {37.576204594709552, 36.262198112854584},
        {35.161924247993916, 38.914793226709506},
        {36.923824100566975, 40.750892738346558},
        {32.066465206030294, 33.361750910843632},
        {28.471916259198828, 35.084034997709466},
        {38.582058681822168, 38.318405506286219},
        {30.617822451605385, 34.815825202484909},
        {28.646638465203214, 44.606510888723911},
        {30.03902442271923, 45.419829276007867},
    };
    std::vector<gnssheight::ingest::DataTuple> t;
    for (const auto& r : rows)
        t.push_back({-1, r[0], r[1]});
    return make_dataset(std::move(t));
}

/// The 20 m three-site scene used by the robustness and uncertainty suites:
/// heavily overlapping class distributions plus a diffraction band, so
/// threshold choice corrupts one-shot labelling while leaving enough signal
/// for the co-training loop.
inline std::pair<gnssheight::synth::SceneSpec, gnssheight::synth::SignalDistributionSpec>
benchmark_scene(std::uint64_t seed, double location_noise_sd = 0.0) {
    gnssheight::synth::SceneSpec scene;
    scene.footprint.id = "benchmark";
    scene.footprint.ring = {{0.0, 0.0, 0.0}, {30.0, 0.0, 0.0}, {30.0, 30.0, 0.0}, {0.0, 30.0, 0.0}};
    scene.true_height = 20.0;
    scene.receiver_sites = {{-25.0, 15.0, 1.5}, {15.0, -40.0, 1.5}, {55.0, 45.0, 1.5}};
    scene.epochs_per_site = 1500;
    scene.satellite_sampler = {5.0, 60.0, 16};
    scene.seed = seed;

    gnssheight::synth::SignalDistributionSpec dist;
    dist.open_mean = 38.0;
    dist.open_sd = 6.0;
    dist.closed_mean = 27.0;
    dist.closed_sd = 6.0;
    dist.blocked_prob_closed = 0.3;
    dist.receiver_floor = 10.0;
    dist.location_noise_sd = location_noise_sd;
    dist.diffraction_band = 3.0;
    dist.diffraction_boost = 0.5;
    return {scene, dist};
}

struct ConvexScene {
    gnssheight::geo::Footprint fp;
    double cx = 0.0;
    double cy = 0.0;
    double rmin = 0.0; // smaller semi-axis
    double rmax = 0.0; // larger semi-axis
};

/// Random convex polygon: vertices sampled in angular order on a rotated
/// ellipse, so the ring is convex and fat enough for centimetre marching.
inline ConvexScene random_convex_footprint(gnssheight::Rng& rng) {
    ConvexScene s;
    s.cx = rng.uniform(-20.0, 20.0);
    s.cy = rng.uniform(-20.0, 20.0);
    const double A = rng.uniform(2.0, 15.0);
    const double B = rng.uniform(2.0, 15.0);
    s.rmin = std::min(A, B);
    s.rmax = std::max(A, B);
    const double psi = rng.uniform(0.0, 2.0 * M_PI);
    const int k = 8 + static_cast<int>(rng.uniform(0.0, 13.0));
    s.fp.id = "convex";
    for (int j = 0; j < k; ++j) {
        const double th = 2.0 * M_PI * (j + 0.2 + 0.6 * rng.uniform()) / k;
        const double ex = A * std::cos(th);
        const double ey = B * std::sin(th);
        s.fp.ring.push_back({s.cx + ex * std::cos(psi) - ey * std::sin(psi),
                             s.cy + ex * std::sin(psi) + ey * std::cos(psi), 0.0});
    }
    return s;
}

/// Bearing from (ox, oy) towards (tx, ty) in compass degrees [0, 360).
inline double bearing_deg(double ox, double oy, double tx, double ty) {
    double az = gnssheight::geo::rad2deg(std::atan2(tx - ox, ty - oy));
    if (az < 0.0)
        az += 360.0;
    if (az >= 360.0)
        az -= 360.0;
    return az;
}

} // namespace fixtures
