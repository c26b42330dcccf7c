#pragma once

// Built-in experiment presets. The texts are kept identical to configs/*.cfg
// (a unit test compares them byte for byte).

#include <array>
#include <optional>
#include <string_view>

namespace sparsense {

struct Preset {
    std::string_view name;
    std::string_view text;
};

inline constexpr std::array<Preset, 5> kPresets = {{
    {"exp1", R"cfg(# Single trial: plain LMS against HARD-LMS with the true sparsity as budget.
[experiment]
name = exp1
trials = 1
seed = 1
normalization = unitary

[signal]
N = 1000
k = 10
amplitude = 1
snr_db = 20

[sensing]
M = 300
mode = repeated
passes = 10

[algorithm LMS]
variant = lms
mu = 1

[algorithm HARD-LMS]
variant = hard
mu = 1
s = 20
# no thresholding during the first pass
burn_in = 1M
)cfg"},
    {"exp2", R"cfg(# Budget comparison for HARD-LMS, plus online sparsity estimation.
# Desk scale: 20 trials (the published curves average 200).
[experiment]
name = exp2
trials = 20
seed = 2
normalization = unitary

[signal]
N = 1000
k = 10
amplitude = 1
snr_db = 20

[sensing]
M = 200
mode = repeated
passes = 100

[algorithm HARD-20]
variant = hard
mu = 1
s = 20
burn_in = 2M

[algorithm HARD-40]
variant = hard
mu = 1
s = 40
burn_in = 2M

[algorithm HARD-80]
variant = hard
mu = 1
s = 80
burn_in = 2M

[algorithm HARD-EST]
variant = hard
mu = 1
s = adaptive
lambda = 0.99
xi = 1
# one tenth of the nonzero magnitude (0.5)
q_star = 0.05
burn_in = 2M

[algorithm LMS]
variant = lms
mu = 1
)cfg"},
    {"exp3", R"cfg(# Sparsity-aware LMS family on the same setting as exp2.
[experiment]
name = exp3
trials = 20
seed = 3
normalization = unitary

[signal]
N = 1000
k = 10
amplitude = 1
snr_db = 20

[sensing]
M = 200
mode = repeated
passes = 100

[algorithm ZA]
variant = za
mu = 1
rho = 0.005

[algorithm RZA]
variant = rza
mu = 1
rho = 0.005
epsilon = 2.25

[algorithm L0]
variant = l0
mu = 1
rho = 0.005
beta = 0.5

[algorithm SZA]
variant = sza
mu = 1
rho = 0.005
s = 20

[algorithm HARD-EST]
variant = hard
mu = 1
s = adaptive
lambda = 0.99
xi = 1
q_star = 0.05
burn_in = 1M

[algorithm HARD-L0]
variant = hard_l0
mu = 1
rho = 0.005
beta = 0.5
s = adaptive
lambda = 0.99
xi = 1
q_star = 0.05
burn_in = 2M
)cfg"},
    {"exp-msweep", R"cfg(# Steady-state r-MSE against the number of samples per window.
[experiment]
name = exp-msweep
trials = 50
seed = 4
normalization = unitary
sweep_M = 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000

[signal]
N = 1000
k = 10
amplitude = 1
snr_db = 20

[sensing]
M = 200
mode = repeated
passes = 50

[algorithm ZA]
variant = za
mu = 1
rho = 0.005

[algorithm RZA]
variant = rza
mu = 1
rho = 0.005
epsilon = 2.25

[algorithm L0]
variant = l0
mu = 1
rho = 0.005
beta = 0.5

[algorithm SZA]
variant = sza
mu = 1
rho = 0.005
s = 20

[algorithm HARD-EST]
variant = hard
mu = 1
s = adaptive
lambda = 0.99
xi = 1
q_star = 0.05
burn_in = 1M

[algorithm HARD-L0]
variant = hard_l0
mu = 1
rho = 0.005
beta = 0.5
s = adaptive
lambda = 0.99
xi = 1
q_star = 0.05
burn_in = 2M
)cfg"},
    {"exp4-tracking", R"cfg(# Tracking a change in sparsity: 10 sines for 150 windows, then 20.
[experiment]
name = exp4-tracking
trials = 1
seed = 5
normalization = unitary

[signal]
N = 1000
k = 10
amplitude = 1
snr_db = 20
change_window = 150
extra_k = 10

[sensing]
M = 200
mode = windowed
windows = 300

[algorithm HARD-EST]
variant = hard
mu = 1
s = adaptive
lambda = 0.98
xi = 20
# one hundredth of the nonzero magnitude (0.5)
q_star = 0.005
burn_in = 2M

[algorithm HARD-EST-SIMPLE]
variant = hard
mu = 1
s = adaptive
lambda = 0.98
xi = 0
q_star = 0.005
burn_in = 2M
)cfg"},
}};

inline std::optional<std::string_view> find_preset(std::string_view name) {
    for (const auto& p : kPresets)
        if (p.name == name) return p.text;
    return std::nullopt;
}

} // namespace sparsense
