#pragma once

#include <cstddef>

// Every numeric tolerance, sample size and threshold used by the acceptance
// suites. Changing a value here changes what the suites accept.
namespace fragchain::tol {

// AC1
inline constexpr double kKappaClosedForm = 1e-12;

// AC2
inline constexpr double kExponentRoot = 1e-9;

// AC3
inline constexpr std::size_t kHomogeneousReplicas = 10'000;
inline constexpr double kStdErrors = 3.0;
inline constexpr double kErosionRate = 0.1;

// AC4
inline constexpr std::size_t kSelfSimilarReplicas = 10'000;
inline constexpr double kSelfSimilarMoment = 0.377290;
inline constexpr double kMomentSeries = 1e-10;
inline constexpr std::size_t kMomentSeriesGrid = 101;

// AC5
inline constexpr std::size_t kFilippovReplicas = 2000;
inline constexpr double kFilippovTime = 50.0;
inline constexpr double kFilippovEpsilon = 1e-6;
inline constexpr double kFilippovLow = 1.85;
inline constexpr double kFilippovHigh = 2.1;
inline constexpr double kScaledMomentRel = 0.10;

// AC6
inline constexpr std::size_t kLlnReplicas = 50;
inline constexpr double kLlnTime = 30.0;
inline constexpr double kLlnEpsilon = 1e-5;
inline constexpr double kLlnMean = 0.02;
inline constexpr double kCltVariance = 0.1;
inline constexpr double kCltMean = 0.05;

// AC7
inline constexpr std::size_t kLargestReplicas = 50;
inline constexpr double kLargestTime = 30.0;
inline constexpr double kLargestEpsilon = 1e-5;
inline constexpr double kLargestRate = 0.03;

// AC8
inline constexpr std::size_t kMartingaleGenerations = 12;
inline constexpr double kMartingaleRounding = 1e-12;
inline constexpr std::size_t kLossyTrees = 10'000;
inline constexpr std::size_t kLossyGeneration = 5;
inline constexpr double kLossyStdErrors = 4.0;
inline constexpr std::size_t kFixedPointSamples = 2000;
inline constexpr std::size_t kFixedPointGeneration = 12;
inline constexpr double kFixedPointKs = 0.05;

// AC9
inline constexpr std::size_t kEnergyReplicas = 200;
inline constexpr double kEnergyEpsilon = 1e-3;
inline constexpr double kEnergyLow = 1.8;
inline constexpr double kEnergyHigh = 2.2;
inline constexpr double kEnergyStability = 0.05;

// AC10
inline constexpr std::size_t kExitReplicas = 200;
inline constexpr double kExitEpsilon = 1e-3;
inline constexpr double kExitKs = 0.05;
inline constexpr double kExitTotalWeight = 0.05;

// AC11
inline constexpr std::size_t kPaintboxN = 10'000;
inline constexpr double kPaintboxFrequency = 0.02;
inline constexpr std::size_t kExchangeabilityReplicas = 3000;
inline constexpr std::size_t kRefinementReplicas = 200;
inline constexpr double kChiSquareLevel = 0.01;

// AC12
inline constexpr std::size_t kTimeChangeSamples = 5000;
inline constexpr double kKsLevel = 0.01;

// AC13
inline constexpr std::size_t kShatteringReplicas = 1000;
inline constexpr std::size_t kShatteringPool = 4000;
inline constexpr double kShatteringHorizon = 50.0;
inline constexpr double kShatteringEpsilon = 1e-4;
inline constexpr double kShatteringCoarseEpsilon = 1e-3;
inline constexpr double kShatteringStability = 0.05;
inline constexpr double kShatteringKs = 0.05;
inline constexpr double kDustRounding = 1e-9;

// AC14
inline constexpr std::size_t kMergeEvents = 3000;
inline constexpr double kMergeWaitRel = 0.10;
inline constexpr std::size_t kCutSamples = 5000;
inline constexpr double kCutTime = 0.7;

// AC15
inline constexpr std::size_t kCrossReplicas = 4000;
inline constexpr double kCrossTime = 2.0;
inline constexpr std::size_t kCrossCountCap = 16;
inline constexpr std::size_t kDeterminismReplicas = 20;
inline constexpr std::size_t kGeneratorSamples = 200'000;
inline constexpr std::size_t kFiniteDifferenceRuns = 1'000'000;
inline constexpr double kFiniteDifferenceStep = 0.01;
inline constexpr double kGenerator = 0.02;

}  // namespace fragchain::tol
