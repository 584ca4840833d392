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

#include "itts/train/synthesize.hpp"

#include "itts/corpus/text.hpp"
#include "itts/error.hpp"

namespace itts::train {

Synthesizer::Synthesizer(AcousticBundle acoustic, VocoderBundle vocoder)
    : acoustic_(std::move(acoustic)), vocoder_(std::move(vocoder)) {
  if (!(acoustic_.mel_config == vocoder_.mel_config)) {
    throw Error(ErrorCode::kValidation, "acoustic and vocoder checkpoints use different mel settings");
  }
}

Synthesizer Synthesizer::load(const std::filesystem::path& acoustic_ckpt,
                              const std::filesystem::path& vocoder_ckpt) {
  return Synthesizer(load_acoustic_checkpoint(acoustic_ckpt), load_vocoder_checkpoint(vocoder_ckpt));
}

corpus::MelSpectrogram Synthesizer::synthesize_mel(const SynthesisRequest& request) {
  if (corpus::normalize_text(request.text).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "text is empty");
  }
  const auto cond = acoustic_.conditioning.lookup(request.speaker, request.language);
  const auto common = acoustic_.frontend.process(request.text, request.language);
  const auto tokens = acoustic_.vocabulary.encode(common);
  if (tokens.empty()) throw Error(ErrorCode::kInvalidArgument, "text is empty after normalization");
  acoustic_.model->eval();
  return acoustic_.model->infer(tokens, cond, acoustic_.mel_config, request.pace).mel_hat;
}

corpus::AudioClip Synthesizer::synthesize(const SynthesisRequest& request) {
  auto audio = vocoder::generate_waveform(vocoder_.generator, synthesize_mel(request));
  if (enhancer_) audio = enhancer_->enhance(audio);
  return audio;
}

}  // namespace itts::train
