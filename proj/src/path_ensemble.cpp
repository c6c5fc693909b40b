#include "mfbsde/path_ensemble.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "mfbsde/errors.hpp"
#include "mfbsde/parallel.hpp"
#include "mfbsde/philox.hpp"

namespace mfbsde {

PathEnsemble simulate_paths(const TimeGrid& grid, int paths, int dim, std::uint64_t seed,
                            std::uint32_t stream) {
    if (paths < 1) throw InvalidArgument("ensemble needs at least one path");
    if (dim < 1) throw InvalidArgument("ensemble noise dimension must be >= 1");
    if (grid.steps < 1) throw InvalidArgument("ensemble requires a built grid");
    const std::int64_t draws_per_path =
        static_cast<std::int64_t>(grid.steps) * dim;
    if (draws_per_path > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidArgument("steps * dim exceeds the counter budget for one path");
    }

    PathEnsemble ens;
    ens.grid = grid;
    ens.paths = paths;
    ens.dim = dim;
    ens.seed = seed;
    ens.increments.assign(static_cast<std::size_t>(grid.steps), RowMat(paths, dim));
    ens.cumulative.assign(static_cast<std::size_t>(grid.steps) + 1, RowMat(paths, dim));
    ens.cumulative[0].setZero();

    const double scale = std::sqrt(grid.dt);
    const NormalSampler normal(seed, stream);
    parallel_for(paths, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t p = begin; p < end; ++p) {
            for (int k = 0; k < grid.steps; ++k) {
                for (int j = 0; j < dim; ++j) {
                    const auto idx = static_cast<std::uint32_t>(k * dim + j);
                    ens.increments[k](p, j) =
                        scale * normal(static_cast<std::uint32_t>(p), idx);
                }
                ens.cumulative[k + 1].row(p) =
                    ens.cumulative[k].row(p) + ens.increments[k].row(p);
            }
        }
    });
    return ens;
}

void write_csv(const PathEnsemble& ensemble, std::ostream& out) {
    out << "path,step,time";
    for (int j = 0; j < ensemble.dim; ++j) out << ",W" << j;
    out << "\n";
    out.precision(17);
    for (int p = 0; p < ensemble.paths; ++p) {
        for (int k = 0; k <= ensemble.grid.steps; ++k) {
            out << p << ',' << k << ',' << ensemble.grid.nodes[k];
            for (int j = 0; j < ensemble.dim; ++j) out << ',' << ensemble.cumulative[k](p, j);
            out << "\n";
        }
    }
}

void write_binary(const PathEnsemble& ensemble, std::ostream& out) {
    const std::uint64_t header[3] = {static_cast<std::uint64_t>(ensemble.paths),
                                     static_cast<std::uint64_t>(ensemble.grid.steps) + 1,
                                     static_cast<std::uint64_t>(ensemble.dim)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (int p = 0; p < ensemble.paths; ++p) {
        for (int k = 0; k <= ensemble.grid.steps; ++k) {
            for (int j = 0; j < ensemble.dim; ++j) {
                const double v = ensemble.cumulative[k](p, j);
                out.write(reinterpret_cast<const char*>(&v), sizeof(double));
            }
        }
    }
}

}  // namespace mfbsde
