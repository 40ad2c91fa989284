// zsabx/losses.h
//
// The training objectives as pure differentiable functions: masked
// cross-entropy over pseudo-label logits, the symmetric contrastive
// audio-visual alignment loss over in-batch negatives, their affine
// combination, plus retrieval recall@k and analytic gradients.

// Copyright 2026  The zsabx authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ZSABX_LOSSES_H_
#define ZSABX_LOSSES_H_

#include <cstdint>
#include <map>
#include <vector>

namespace zsabx {

struct LossConfig {
  double alpha = 0.5;        // weight of the alignment loss in the combination
  double temperature = 0.07;
};

// Row i of audio is paired with row i of image.
struct BatchPair {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> audio;  // n x d
  std::vector<double> image;  // n x d

  void validate() const;  // finite, matching sizes, no zero-norm rows
};

// Mean over masked positions of -log softmax(logits)[label], with
// max-subtraction. logits is m x k row-major.
double masked_ce(const std::vector<double>& logits, std::size_t m,
                 std::size_t k, const std::vector<std::int32_t>& labels,
                 const std::vector<bool>& mask);

// Symmetric temperature-scaled softmax cross-entropy over cosine
// similarities, audio->image and image->audio, averaged over 2N terms.
double contrastive_av(const BatchPair& batch, double temperature);

// L = (1 - alpha) * l_a + alpha * l_av
double combined_loss(double l_a, double l_av, double alpha);

struct GradPair {
  std::vector<double> d_audio;  // n x d
  std::vector<double> d_image;  // n x d
};

// Analytic gradient of contrastive_av w.r.t. both embedding matrices,
// including the cosine-normalization Jacobian.
GradPair grad_contrastive_av(const BatchPair& batch, double temperature);

struct RecallResult {
  std::map<std::size_t, double> audio_to_image;
  std::map<std::size_t, double> image_to_audio;
};

// Fraction of rows whose true pair ranks within the top k of its
// similarity row (audio->image) or column (image->audio). Ties rank the
// lower index first.
RecallResult retrieval_recall(const BatchPair& batch,
                              const std::vector<std::size_t>& ks);

}  // namespace zsabx

#endif  // ZSABX_LOSSES_H_
