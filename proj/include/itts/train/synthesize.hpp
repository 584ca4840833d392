// Copyright (c) 2026 The itts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "itts/corpus/audio.hpp"
#include "itts/train/acoustic_trainer.hpp"
#include "itts/train/vocoder_trainer.hpp"

namespace itts::train {

// Post-processing stage applied to the vocoder output (e.g. a speech
// enhancement network).
class Enhancer {
 public:
  virtual ~Enhancer() = default;
  virtual corpus::AudioClip enhance(const corpus::AudioClip& audio) = 0;
};

class IdentityEnhancer final : public Enhancer {
 public:
  corpus::AudioClip enhance(const corpus::AudioClip& audio) override { return audio; }
};

struct SynthesisRequest {
  std::string text;
  std::string speaker;   // required when the model has a speaker table
  std::string language;  // required when the model has a language table
  double pace = 1.0;
};

// Acoustic model followed by vocoder. Inference uses no randomness, so equal
// inputs give identical waveforms.
class Synthesizer {
 public:
  // Throws Error{kValidation} when the two checkpoints disagree on the mel
  // configuration.
  Synthesizer(AcousticBundle acoustic, VocoderBundle vocoder);
  static Synthesizer load(const std::filesystem::path& acoustic_ckpt,
                          const std::filesystem::path& vocoder_ckpt);

  void set_enhancer(std::shared_ptr<Enhancer> enhancer) { enhancer_ = std::move(enhancer); }

  // Throws Error{kInvalidArgument} for empty text, Error{kUnmappedGrapheme}
  // for characters outside the vocabulary and Error{kNotFound} for an
  // unknown speaker or language.
  corpus::AudioClip synthesize(const SynthesisRequest& request);
  corpus::MelSpectrogram synthesize_mel(const SynthesisRequest& request);

  const AcousticBundle& acoustic() const { return acoustic_; }
  const VocoderBundle& vocoder() const { return vocoder_; }

 private:
  AcousticBundle acoustic_;
  VocoderBundle vocoder_;
  std::shared_ptr<Enhancer> enhancer_;
};

}  // namespace itts::train
