import pandas as pd
df = pd.read_csv("train.csv")
df = df.dropna()
X = df.drop("y", axis=1)
y = df["y"]
