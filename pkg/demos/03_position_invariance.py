# # Position-invariant casing through prefix distillation
#
# Training text capitalizes the first word of every sentence.  A model
# trained on it learns to capitalize whatever comes first, which is wrong
# when the input is a fragment.  Decoding with a dummy prefix ("so ,") and
# stripping it afterwards removes the effect; retraining a student on those
# prefixed outputs bakes it into the model.

from truecaser import ModelConfig, TrainOptions, train, truecase
from truecaser.corpus import case_fold
from truecaser.distill import DEFAULT_PREFIX, distill_train
from truecaser.evaluate import score
from truecaser.toydata import intrinsic_corpus, positional_corpus

source = positional_corpus(400, seed=1)     # first word always capitalized
refs = intrinsic_corpus(200, seed=2)        # only names capitalized
folded = [case_fold(r) for r in refs]
print("training sentence:", " ".join(source[0]))
print("reference        :", " ".join(refs[0]))

cfg = ModelConfig(input_embedding_size=32, output_embedding_size=32,
                  encoder_cells_per_layer=32, decoder_cells_per_layer=32, dropout_rate=0.0)
opts = TrainOptions(epochs=40, lr=0.3, batch=16, seed=0, patience=None)
teacher = train(source, cfg, opts).model


def first_word(model, prefix=None):
    hyp = [truecase(x, model, prefix=prefix) for x in folded]
    return score(hyp, refs).first_word_accuracy


print("teacher             :", first_word(teacher))
print("teacher + prefix    :", first_word(teacher, DEFAULT_PREFIX))

result, regenerated = distill_train(teacher, source, cfg, opts)
print("regenerated example :", " ".join(regenerated[0]))
print("distilled student   :", first_word(result.model))
