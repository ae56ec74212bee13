# # Evaluation metrics
#
# Precision and recall are counted only over tokens that are not all
# lowercase; a prediction is correct only if the whole token matches.

from truecaser.evaluate import score

ref = [["Apple", "is", "Good", "friend"], ["the", "iPhone", "from", "NASA"]]
hyp = [["Apple", "is", "good", "Friend"], ["The", "Iphone", "from", "NASA"]]

report = score(hyp, ref)
print(report.format_table())

# Per-class accuracy splits the reference tokens into all lowercase (LC),
# capitalized (UC), all caps (CA) and mixed case (MC).

for name, st in report.per_class.items():
    print(name, st.count, st.accuracy)

# The same report as JSON, as written by ``truecaser evaluate``:
print(report.to_json())
