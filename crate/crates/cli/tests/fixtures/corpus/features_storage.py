import pickle
import pandas as pd
from sklearn.decomposition import PCA
from sklearn.ensemble import GradientBoostingClassifier as GBC

raw = pd.read_csv('signals.csv').dropna()
components = PCA(n_components=8).fit_transform(raw.values)
model = GBC()
model.fit(components, raw['y'])
with open('model.pkl', 'wb') as fh:
    pickle.dump(model, fh)
