# # Training a small model and truecasing with it
#
# A compact network is trained on a synthetic corpus full of mixed-case
# names, then used to restore case on lowercased text.  Takes a few
# seconds on one core.

import time

from truecaser import ModelConfig, TrainOptions, train, truecase
from truecaser.corpus import case_fold
from truecaser.evaluate import score
from truecaser.serialize import dumps, loads
from truecaser.toydata import toy_corpus

corpus = toy_corpus(200, seed=0)
print(len(corpus), "sentences, e.g.:", " ".join(corpus[3]))

cfg = ModelConfig(input_embedding_size=32, output_embedding_size=32,
                  encoder_cells_per_layer=32, decoder_cells_per_layer=32, dropout_rate=0.0)

t = time.time()
result = train(corpus, cfg, TrainOptions(epochs=40, lr=0.3, batch=16, seed=0))
print(f"trained in {time.time() - t:.1f}s; final loss {result.history[-1].mean_loss:.3f}")
model = result.model

# ## Decoding

for line in ["apple released the iphone in paris", "nasa and ibm visited mcdonald's",
             "the bbc said hewlett-packard opened a store"]:
    print(line, "->", " ".join(truecase(line.split(), model)))

# ## Scoring on held-out sentences

held_out = toy_corpus(100, seed=7)
hyp = [truecase(case_fold(s), model) for s in held_out]
report = score(hyp, held_out)
print(report.format_table())

# ## Saving
# Models are stored as float32 tensors plus their JSON config.

blob = dumps(model)
print(f"model file: {len(blob) / 1024:.0f} KiB")
assert truecase(["nasa"], loads(blob)) == truecase(["nasa"], model)
