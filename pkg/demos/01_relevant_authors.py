"""Who drives the conversation under a news video?

Aggregates the bundled news thread per author, looks at the usual
suspects by hand, then lets a logistic model pick out the authors who are
above average on every activity measure.
"""

from commentscope import dataset, fixtures, relevance

comments = fixtures.load_news()
records = dataset.aggregate_by_author(dataset.to_rows(comments))
print(f"{len(comments)} messages from {len(records)} authors")

stats = dataset.summary_stats(records)
for name in dataset.FEATURES:
    s = getattr(stats, name)
    print(f"  {name:<9} mean {s.mean:8.4f}  median {s.median:6.1f}  max {s.max:6.0f}")

# A hand-picked cut first: anyone who replied, was liked and wrote a bit.
active = dataset.filter_active(records, dataset.ActivityThresholds(1, 1, 10, 1))
print(f"\n{len(active)} authors pass the fixed thresholds 1,1,10,1")

top = dataset.rank_by(records, "likes")[0]
print(f"most liked: {top.author} {top.values()}")
for sentence in dataset.sentences_of(comments, top.author):
    print("   >", sentence)

# The data-driven cut: binarize every feature against its mean.
design = relevance.design_matrix(relevance.binarize(records, stats))
fit = relevance.fit_logistic(design)
print()
print(fit.report())

classes = relevance.classify(relevance.predict_probabilities(fit, design))
positives = relevance.positive_cases(classes)
print("\nhot spots of communication (table rows):", *positives)
print("accuracy:", relevance.accuracy(classes, design.y))
