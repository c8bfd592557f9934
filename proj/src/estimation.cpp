// SPDX-License-Identifier: Apache-2.0
//
// csivis - angular-delay CSI imaging and channel estimation workbench
// Copyright (C) 2026 The csivis authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "csivis/estimation.hpp"
#include "csivis/imaging.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <string>

namespace csivis
{
    namespace
    {
        // Most coherent column pair; used to name the culprit of a rank deficiency.
        std::pair<std::size_t, std::size_t> most_coherent_pair(const Eigen::MatrixXcd &a)
        {
            std::pair<std::size_t, std::size_t> best{0, a.cols() > 1 ? 1 : 0};
            double best_coherence = -1.0;
            for (Eigen::Index i = 0; i < a.cols(); ++i)
                for (Eigen::Index j = i + 1; j < a.cols(); ++j)
                {
                    const double denom = a.col(i).norm() * a.col(j).norm();
                    const double c = denom > 0.0 ? std::abs(a.col(i).dot(a.col(j))) / denom : 1.0;
                    if (c > best_coherence)
                    {
                        best_coherence = c;
                        best = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
                    }
                }
            return best;
        }

        Eigen::VectorXcd conj_delay_vector(double delay, Eigen::Index n)
        {
            return delay_vector(delay, n).conjugate();
        }
    }

    DegenerateDictionaryError::DegenerateDictionaryError(std::size_t first, std::size_t second)
        : DomainError("Degenerate LS dictionary: columns " + std::to_string(first) + " and " + std::to_string(second) +
                      " are linearly dependent."),
          first_(first), second_(second)
    {
    }

    CovarianceModel::CovarianceModel(Eigen::MatrixXcd antenna_cov, int sample_count)
        : cov_(std::move(antenna_cov)), sample_count_(sample_count)
    {
        if (cov_.rows() < 1 || cov_.rows() != cov_.cols())
            throw DomainError("Covariance must be a non-empty square matrix.");
        if (sample_count_ < 1)
            throw DomainError("Covariance sample count must be positive.");
        if (!cov_.allFinite())
            throw DomainError("Covariance entries must be finite.");
        const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
        if ((cov_ - cov_.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw DomainError("Covariance is not Hermitian.");
        const double trace = cov_.trace().real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov_, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-8 * std::abs(trace))
            throw DomainError("Covariance is not positive semidefinite.");
    }

    Eigen::MatrixXcd path_dictionary(const std::vector<DetectedPath> &paths, Eigen::Index m, Eigen::Index n)
    {
        Eigen::MatrixXcd a(m * n, static_cast<Eigen::Index>(paths.size()));
        for (std::size_t l = 0; l < paths.size(); ++l)
        {
            const Eigen::VectorXcd sv = steering_vector(paths[l].angle_hat, m);
            const Eigen::VectorXcd dv = conj_delay_vector(paths[l].delay_hat, n);
            for (Eigen::Index c = 0; c < n; ++c)
                a.col(static_cast<Eigen::Index>(l)).segment(c * m, m) = sv * dv[c];
        }
        return a;
    }

    GainFit ls_gains(const PilotObservation &y, const std::vector<DetectedPath> &paths)
    {
        const Eigen::Index m = y.num_antennas();
        const Eigen::Index n = y.num_subcarriers();
        if (paths.empty())
            throw DomainError("ls_gains requires at least one path.");
        if (static_cast<Eigen::Index>(paths.size()) > m * n)
            throw DomainError("ls_gains: more paths than observations.");

        for (std::size_t i = 0; i < paths.size(); ++i)
            for (std::size_t j = i + 1; j < paths.size(); ++j)
                if (paths[i].angle_hat == paths[j].angle_hat && paths[i].delay_hat == paths[j].delay_hat)
                    throw DegenerateDictionaryError(i, j);

        const Eigen::MatrixXcd a = path_dictionary(paths, m, n);
        const Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(y.entries().data(), m * n) / std::sqrt(y.pilot_power());

        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
        qr.setThreshold(1e-10);
        if (qr.rank() < a.cols())
        {
            const auto [i, j] = most_coherent_pair(a);
            throw DegenerateDictionaryError(i, j);
        }

        GainFit fit;
        fit.gains = qr.solve(b);
        fit.residual_energy = (b - a * fit.gains).squaredNorm();
        const auto r = qr.matrixR().diagonal().cwiseAbs();
        fit.condition_hint = r[0] / r[a.cols() - 1];
        return fit;
    }

    ChannelMatrix reconstruct(const std::vector<DetectedPath> &paths, const Eigen::VectorXcd &gains, Eigen::Index m, Eigen::Index n)
    {
        if (static_cast<Eigen::Index>(paths.size()) != gains.size())
            throw DomainError("reconstruct: number of paths and gains differ.");
        if (m < 1 || n < 1)
            throw DomainError("reconstruct: dimensions must be positive.");
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, n);
        for (std::size_t l = 0; l < paths.size(); ++l)
        {
            const Eigen::VectorXcd sv = steering_vector(paths[l].angle_hat, m);
            const Eigen::VectorXcd dv = delay_vector(paths[l].delay_hat, n);
            h.noalias() += gains[static_cast<Eigen::Index>(l)] * sv * dv.adjoint();
        }
        return ChannelMatrix(std::move(h));
    }

    ChannelMatrix ls_estimate(const PilotObservation &y)
    {
        return ChannelMatrix(y.entries() / std::sqrt(y.pilot_power()));
    }

    CovarianceModel estimate_covariance(const std::vector<ChannelMatrix> &samples)
    {
        if (samples.size() < 2)
            throw DomainError("estimate_covariance requires at least two samples.");
        const Eigen::Index m = samples.front().num_antennas();
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(m, m);
        double columns = 0.0;
        for (const auto &s : samples)
        {
            if (s.num_antennas() != m)
                throw DomainError("estimate_covariance: inconsistent antenna counts.");
            r.noalias() += s.entries() * s.entries().adjoint();
            columns += static_cast<double>(s.num_subcarriers());
        }
        r /= columns;
        const Eigen::MatrixXcd hermitian = 0.5 * (r + r.adjoint());
        return CovarianceModel(hermitian, static_cast<int>(samples.size()));
    }

    ChannelMatrix lmmse_estimate(const PilotObservation &y, const CovarianceModel &cov)
    {
        const Eigen::Index m = y.num_antennas();
        if (cov.dimension() != m)
            throw DomainError("lmmse_estimate: covariance dimension does not match the antenna count.");
        if (y.noise_variance() == 0.0)
            return ls_estimate(y);

        const double shrink = y.noise_variance() / y.pilot_power();
        const Eigen::MatrixXcd &r = cov.antenna_cov();
        const Eigen::MatrixXcd regularized = r + shrink * Eigen::MatrixXcd::Identity(m, m);
        // R (R + s I)^-1 = (R + s I)^-1 R since both are functions of R.
        const Eigen::MatrixXcd filter = regularized.ldlt().solve(r);
        return ChannelMatrix(filter * (y.entries() / std::sqrt(y.pilot_power())));
    }

    Nmse nmse(const ChannelMatrix &truth, const ChannelMatrix &estimate)
    {
        if (truth.num_antennas() != estimate.num_antennas() || truth.num_subcarriers() != estimate.num_subcarriers())
            throw DomainError("nmse: dimension mismatch.");
        const double denom = truth.entries().squaredNorm();
        if (!(denom > 0.0))
            throw DomainError("nmse: reference channel has zero norm.");
        Nmse out;
        out.linear = (truth.entries() - estimate.entries()).squaredNorm() / denom;
        out.db = 10.0 * std::log10(out.linear);
        return out;
    }

    PipelineEstimate fit_detections(const PilotObservation &y, int beta, int gamma, std::vector<Detection> detections)
    {
        const Eigen::Index m = y.num_antennas();
        const Eigen::Index n = y.num_subcarriers();
        PipelineEstimate out;
        out.detections = std::move(detections);
        out.paths = detections_to_paths(out.detections, beta * m, gamma * n);
        if (out.paths.empty())
        {
            out.fit.gains = Eigen::VectorXcd(0);
            out.fit.residual_energy = (y.entries() / std::sqrt(y.pilot_power())).squaredNorm();
            out.channel = ChannelMatrix(Eigen::MatrixXcd::Zero(m, n));
            return out;
        }
        out.fit = ls_gains(y, out.paths);
        out.channel = reconstruct(out.paths, out.fit.gains, m, n);
        return out;
    }

    PipelineEstimate detect_and_fit(const PilotObservation &y, int beta, int gamma, const PeakDetectorConfig &detector)
    {
        const AngularDelayMap map = to_angular_delay(y, beta, gamma);
        const NormalizedImage norm = modulus_normalize(map);
        return fit_detections(y, beta, gamma, detect_peaks_builtin(norm.values, detector));
    }
}
