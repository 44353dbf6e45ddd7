import numpy as np
import pandas as pd
import matplotlib.pyplot as plt
import seaborn as sns
from sklearn.model_selection import train_test_split, cross_val_score
from sklearn.preprocessing import StandardScaler, LabelEncoder
from sklearn.ensemble import RandomForestClassifier, GradientBoostingClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import accuracy_score, confusion_matrix, classification_report

train = pd.read_csv("../input/train.csv")
test = pd.read_csv("../input/test.csv")
print(train.shape, test.shape)
train.head()
train.describe()
train.info()

sns.countplot(x="Survived", data=train)
plt.show()
sns.heatmap(train.corr(), annot=True, cmap="coolwarm")
plt.show()

train["Age"] = train["Age"].fillna(train["Age"].median())
test["Age"] = test["Age"].fillna(test["Age"].median())
train["Embarked"] = train["Embarked"].fillna("S")
test["Fare"] = test["Fare"].fillna(test["Fare"].median())
train["FamilySize"] = train["SibSp"] + train["Parch"] + 1
test["FamilySize"] = test["SibSp"] + test["Parch"] + 1
train["IsAlone"] = (train["FamilySize"] == 1).astype(int)
test["IsAlone"] = (test["FamilySize"] == 1).astype(int)
train["Title"] = train["Name"].str.extract(r" ([A-Za-z]+)\.", expand=False)
test["Title"] = test["Name"].str.extract(r" ([A-Za-z]+)\.", expand=False)

encoder = LabelEncoder()
for col in ["Sex", "Embarked", "Title"]:
    train[col] = encoder.fit_transform(train[col].astype(str))
    test[col] = encoder.fit_transform(test[col].astype(str))

features = ["Pclass", "Sex", "Age", "Fare", "Embarked", "FamilySize", "IsAlone", "Title"]
X = train[features]
y = train["Survived"]
X_test = test[features]

scaler = StandardScaler()
X = scaler.fit_transform(X)
X_test = scaler.transform(X_test)
X_train, X_val, y_train, y_val = train_test_split(X, y, test_size=0.2, random_state=42)

logreg = LogisticRegression(max_iter=1000)
logreg.fit(X_train, y_train)
print(accuracy_score(y_val, logreg.predict(X_val)))

rf = RandomForestClassifier(n_estimators=200, max_depth=6, random_state=42)
rf.fit(X_train, y_train)
rf_pred = rf.predict(X_val)
print(accuracy_score(y_val, rf_pred))
print(confusion_matrix(y_val, rf_pred))
print(classification_report(y_val, rf_pred))

gb = GradientBoostingClassifier(n_estimators=300, learning_rate=0.05, max_depth=3)
gb.fit(X_train, y_train)
print(cross_val_score(gb, X, y, cv=5).mean())

importances = pd.Series(rf.feature_importances_, index=features).sort_values()
importances.plot(kind="barh", figsize=(8, 6))
plt.title("Feature importance")
plt.show()

predictions = gb.predict(X_test)
submission = pd.DataFrame({"PassengerId": test["PassengerId"], "Survived": predictions})
submission.to_csv("submission.csv", index=False)
