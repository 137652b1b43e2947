// Times the OpenMP kernels against their serial reference implementations and
// confirms the outputs stay bit-identical. Sizes are overridable:
//   bench_kernels [posterior-samples] [sequence-length]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "bct/context_tree.hpp"
#include "bct/entropy.hpp"
#include "bct/parallel.hpp"
#include "bct/posterior.hpp"
#include "bct/sequence.hpp"
#include "bct/simulator.hpp"

using namespace bct;

namespace {

template <typename Fn>
double time_seconds(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_samples(const PosteriorSampleSet& a, const PosteriorSampleSet& b) {
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const JointSample& s = a.samples[i];
        const JointSample& t = b.samples[i];
        if (s.tree.key() != t.tree.key() || s.params.theta != t.params.theta ||
            s.entropy != t.entropy || s.method != t.method)
            return false;
    }
    return true;
}

void report(const char* kernel, double serial, double parallel, bool identical) {
    std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   identical %s\n",
                kernel, serial, parallel, serial / parallel, identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    const std::uint64_t samples = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 50000;
    const std::uint64_t length = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20000;

    const Fixture f = fixture_chain("ternary-d2");
    const Sequence sim = generate({f.spec, length, InitialContextPolicy::BurnIn, {}, 1});
    const Sequence x(sim.alphabet, sim.symbols);

    ContextTree tree = ContextTree::build(x, PriorConfig::defaults(3, 10));
    tree.compute_weighted();
    std::printf("n %llu, posterior samples %llu, threads %d\n",
                static_cast<unsigned long long>(length),
                static_cast<unsigned long long>(samples), thread_count());

    SampleSetOptions opts;
    opts.count = samples;
    opts.seed = 7;

    PosteriorSampleSet serial_set{Alphabet{3}, 0, {}};
    PosteriorSampleSet parallel_set{Alphabet{3}, 0, {}};
    const double t_sample_serial =
        time_seconds([&] { serial_set = sample_joint_serial(tree, opts); });
    const double t_sample_parallel = time_seconds([&] { parallel_set = sample_joint(tree, opts); });
    report("sample_joint", t_sample_serial, t_sample_parallel,
           same_samples(serial_set, parallel_set));

    EntropyPolicy exact_policy;
    exact_policy.seed = 7;
    PosteriorSampleSet fill_serial = serial_set;
    PosteriorSampleSet fill_parallel = parallel_set;
    const double t_fill_serial =
        time_seconds([&] { fill_entropy_serial(fill_serial, exact_policy); });
    const double t_fill_parallel = time_seconds([&] { fill_entropy(fill_parallel, exact_policy); });
    report("fill_entropy (exact)", t_fill_serial, t_fill_parallel,
           same_samples(fill_serial, fill_parallel));

    EntropyPolicy mc_policy;
    mc_policy.seed = 7;
    mc_policy.force_mc = true;
    mc_policy.mc_length = 5000;
    fill_serial = serial_set;
    fill_parallel = parallel_set;
    const double t_mc_serial = time_seconds([&] { fill_entropy_serial(fill_serial, mc_policy); });
    const double t_mc_parallel = time_seconds([&] { fill_entropy(fill_parallel, mc_policy); });
    report("fill_entropy (mc)", t_mc_serial, t_mc_parallel,
           same_samples(fill_serial, fill_parallel));

    return 0;
}
