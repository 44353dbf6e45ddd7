import pandas as pd
from sklearn.model_selection import train_test_split
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import accuracy_score

df = pd.read_csv('train.csv')
test = pd.read_csv('test.csv')
df['Age'] = df['Age'].fillna(df['Age'].median())
df = pd.get_dummies(df, columns=['Sex', 'Embarked'])
X_train, X_val, y_train, y_val = train_test_split(df.drop('Survived', axis=1), df['Survived'])

clf = LogisticRegression(max_iter=200)
clf.fit(X_train, y_train)
print(accuracy_score(y_val, clf.predict(X_val)))
submission = clf.predict(test)
