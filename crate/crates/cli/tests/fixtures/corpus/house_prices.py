import pandas as pd
import xgboost as xgb

train = pd.read_csv('train.csv')
train = train.dropna(axis=1)
y = train.pop('SalePrice')
model = xgb.XGBRegressor(n_estimators=500)
model.fit(train, y)
preds = model.predict(pd.read_csv('test.csv'))
pd.DataFrame({'SalePrice': preds}).to_csv('submission.csv', index=False)
